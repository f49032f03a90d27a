// Copyright 2026 The nafd-isac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nafd/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nafd/rng.hpp"

namespace nafd {
namespace {

enum LinkClass : std::uint64_t { kDl = 1, kUl = 2, kUserToUser = 3, kCross = 4, kDlError = 11, kCrossError = 14 };

template <typename Block>
void fill_cn(Block&& block, double amplitude, double variance, std::uint64_t seed,
             std::initializer_list<std::uint64_t> key) {
  Rng rng = make_stream(seed, key);
  for (Eigen::Index c = 0; c < block.cols(); ++c)
    for (Eigen::Index r = 0; r < block.rows(); ++r) block(r, c) = amplitude * complex_normal(rng, variance);
}

double gain(const Position& a, const Position& b, double alpha, const FadingParams& params) {
  return large_scale_gain((a - b).norm(), alpha, params.reference_distance);
}

}  // namespace

void validate(const FadingParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(p.alpha_dl, "alpha_dl");
  positive(p.alpha_ul, "alpha_ul");
  positive(p.alpha_t, "alpha_t");
  positive(p.alpha_i, "alpha_i");
  positive(p.sigma2_dl, "sigma2_dl");
  positive(p.sigma2_ul, "sigma2_ul");
  if (p.sigma2_sp_dl < 0.0) throw std::invalid_argument("sigma2_sp_dl must be non-negative");
  if (p.sigma2_sp_ul < 0.0) throw std::invalid_argument("sigma2_sp_ul must be non-negative");
  if (p.reference_distance < 0.0) throw std::invalid_argument("reference_distance must be non-negative");
}

double large_scale_gain(double d, double alpha, double reference_distance) {
  if (!(d >= kMinSeparation))
    throw std::domain_error("large_scale_gain: distance " + std::to_string(d) + " m below minimum separation");
  const double scaled = reference_distance > 0.0 ? d / reference_distance : d;
  return std::pow(scaled, -alpha);
}

ChannelSet draw_channels(const NetworkLayout& layout, const FadingParams& params, std::uint64_t seed) {
  const int n = layout.n_antennas();
  const int m_dl = layout.m_dl(), m_ul = layout.m_ul(), k_dl = layout.k_dl(), k_ul = layout.k_ul();
  ChannelSet ch;
  ch.n_antennas = n;
  ch.g_dl.truth.resize(m_dl * n, k_dl);
  ch.g_ul.truth.resize(m_ul * n, k_ul);
  ch.g_t.truth.resize(k_dl, k_ul);
  ch.g_i.truth.resize(m_ul * n, m_dl * n);

  for (int m = 0; m < m_dl; ++m)
    for (int l = 0; l < k_dl; ++l)
      fill_cn(ch.g_dl.truth.block(m * n, l, n, 1), gain(layout.dl_rrus[m].center, layout.dl_users[l], params.alpha_dl, params),
              1.0, seed, {kDl, std::uint64_t(m), std::uint64_t(l)});
  for (int nn = 0; nn < m_ul; ++nn)
    for (int k = 0; k < k_ul; ++k)
      fill_cn(ch.g_ul.truth.block(nn * n, k, n, 1), gain(layout.ul_rrus[nn].center, layout.ul_users[k], params.alpha_ul, params),
              1.0, seed, {kUl, std::uint64_t(nn), std::uint64_t(k)});
  for (int l = 0; l < k_dl; ++l)
    for (int k = 0; k < k_ul; ++k)
      fill_cn(ch.g_t.truth.block(l, k, 1, 1), gain(layout.dl_users[l], layout.ul_users[k], params.alpha_t, params), 1.0,
              seed, {kUserToUser, std::uint64_t(l), std::uint64_t(k)});
  for (int nn = 0; nn < m_ul; ++nn)
    for (int m = 0; m < m_dl; ++m)
      fill_cn(ch.g_i.truth.block(nn * n, m * n, n, n),
              gain(layout.dl_rrus[m].center, layout.ul_rrus[nn].center, params.alpha_i, params), 1.0, seed,
              {kCross, std::uint64_t(nn), std::uint64_t(m)});

  for (auto* link : {&ch.g_dl, &ch.g_ul, &ch.g_t, &ch.g_i}) {
    link->estimate = link->truth;
    link->error = ComplexMatrix::Zero(link->truth.rows(), link->truth.cols());
  }
  return ch;
}

ChannelSet split_estimate_error(ChannelSet ch, const FadingParams& params, std::uint64_t seed) {
  const int n = ch.n_antennas;
  const auto k_dl = ch.g_dl.truth.cols();
  const auto m_dl = n > 0 ? ch.g_dl.truth.rows() / n : 0;
  const auto m_ul = n > 0 ? ch.g_ul.truth.rows() / n : 0;

  if (params.sigma2_sp_dl > 0.0) {
    for (Eigen::Index m = 0; m < m_dl; ++m)
      for (Eigen::Index l = 0; l < k_dl; ++l)
        fill_cn(ch.g_dl.error.block(m * n, l, n, 1), 1.0, params.sigma2_sp_dl, seed,
                {kDlError, std::uint64_t(m), std::uint64_t(l)});
  } else {
    ch.g_dl.error.setZero();
  }
  if (params.sigma2_sp_ul > 0.0) {
    for (Eigen::Index nn = 0; nn < m_ul; ++nn)
      for (Eigen::Index m = 0; m < m_dl; ++m)
        fill_cn(ch.g_i.error.block(nn * n, m * n, n, n), 1.0, params.sigma2_sp_ul, seed,
                {kCrossError, std::uint64_t(nn), std::uint64_t(m)});
  } else {
    ch.g_i.error.setZero();
  }
  // Re-forming the truth from its parts (a sub-ulp change) makes
  // estimate + error == truth hold exactly in floating point.
  ch.g_dl.estimate = ch.g_dl.truth - ch.g_dl.error;
  ch.g_dl.truth = ch.g_dl.estimate + ch.g_dl.error;
  ch.g_i.estimate = ch.g_i.truth - ch.g_i.error;
  ch.g_i.truth = ch.g_i.estimate + ch.g_i.error;
  ch.g_ul.error.setZero();
  ch.g_ul.estimate = ch.g_ul.truth;
  ch.g_t.error.setZero();
  ch.g_t.estimate = ch.g_t.truth;
  return ch;
}

ChannelSet draw_realization(const NetworkLayout& layout, const FadingParams& params, std::uint64_t seed) {
  return split_estimate_error(draw_channels(layout, params, derive_seed(seed, {0})), params,
                              derive_seed(seed, {1}));
}

}  // namespace nafd
