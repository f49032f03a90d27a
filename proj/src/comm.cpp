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

#include "nafd/comm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nafd/parallel.hpp"
#include "nafd/rng.hpp"

namespace nafd {

Eigen::VectorXd constraint_load(const PowerAllocation& alloc, const BeamSet& beams) {
  const int m_dl = static_cast<int>(alloc.beta.size());
  Eigen::VectorXd load(m_dl);
  for (int m = 0; m < m_dl; ++m) {
    double sum = alloc.beta(m) * beams.sensing_norm2(m);
    for (int i = 0; i < alloc.alpha.cols(); ++i) sum += alloc.alpha(m, i) * beams.data_norm2(m, i);
    load(m) = sum;
  }
  return load;
}

bool satisfies_power_constraint(const PowerAllocation& alloc, const BeamSet& beams, double tolerance) {
  return (constraint_load(alloc, beams).array() <= 1.0 + tolerance).all();
}

void validate(const PowerAllocation& alloc, int m_dl, int k_dl, int k_ul) {
  if (alloc.alpha.rows() != m_dl || alloc.alpha.cols() != k_dl)
    throw std::invalid_argument("alpha must be M_dl x K_dl");
  if (alloc.beta.size() != m_dl) throw std::invalid_argument("beta must have M_dl entries");
  if (alloc.p_ul.size() != k_ul) throw std::invalid_argument("p_ul must have K_ul entries");
  if (!(alloc.p_max > 0.0)) throw std::invalid_argument("p_max must be positive");
  if ((alloc.alpha.array() < 0.0).any() || (alloc.beta.array() < 0.0).any() || (alloc.p_ul.array() < 0.0).any())
    throw std::invalid_argument("power factors must be non-negative");
}

LinkFeatures extract_features(const ChannelSet& ch, const BeamSet& beams) {
  const int n = ch.n_antennas;
  const int k_dl = static_cast<int>(ch.g_dl.truth.cols());
  const int k_ul = static_cast<int>(ch.g_ul.truth.cols());
  const int m_dl = beams.m_dl();
  LinkFeatures f;

  f.mu_dl.resize(m_dl);
  f.pilot_dl2.resize(k_dl, m_dl);
  for (int m = 0; m < m_dl; ++m) {
    const auto g_m = ch.g_dl.truth.middleRows(m * n, n);
    const auto w_m = beams.w_c.middleRows(m * n, n);
    f.mu_dl[m] = g_m.adjoint() * w_m;
    const ComplexVector leak = ch.g_dl.error.middleRows(m * n, n).adjoint() * beams.w_s.col(m);
    f.pilot_dl2.col(m) = leak.cwiseAbs2();
  }
  f.user_to_user2 = ch.g_t.truth.cwiseAbs2();

  f.combiner_gain2 = (beams.v.adjoint() * ch.g_ul.truth).cwiseAbs2();
  f.combiner_norm2 = beams.v.colwise().squaredNorm().transpose();
  // v_k^H G~_{I,m} for all m at once: K_ul x (M_dl N).
  const ComplexMatrix v_cross = beams.v.adjoint() * ch.g_i.error;
  f.cross_ul.resize(m_dl);
  f.pilot_ul2.resize(k_ul, m_dl);
  for (int m = 0; m < m_dl; ++m) {
    const auto vg = v_cross.middleCols(m * n, n);
    f.cross_ul[m] = vg * beams.w_c.middleRows(m * n, n);
    f.pilot_ul2.col(m) = (vg * beams.w_s.col(m)).cwiseAbs2();
  }
  return f;
}

SinrTerms downlink_terms(const LinkFeatures& f, const PowerAllocation& a, int l, double noise_power,
                         NumeratorMode mode) {
  const int m_dl = static_cast<int>(f.mu_dl.size());
  const int k_dl = static_cast<int>(a.alpha.cols());
  SinrTerms t;
  for (int i = 0; i < k_dl; ++i) {
    double power;
    if (mode == NumeratorMode::kLiteral) {
      std::complex<double> mu = 0.0;
      for (int m = 0; m < m_dl; ++m) mu += f.mu_dl[m](l, i);
      power = a.p_max * a.alpha.col(i).sum() * std::norm(mu);
    } else {
      std::complex<double> sum = 0.0;
      for (int m = 0; m < m_dl; ++m) sum += std::sqrt(a.p_max * a.alpha(m, i)) * f.mu_dl[m](l, i);
      power = std::norm(sum);
    }
    (i == l ? t.signal : t.inter_user) += power;
  }
  for (Eigen::Index k = 0; k < a.p_ul.size(); ++k) t.cross_link += a.p_ul(k) * f.user_to_user2(l, k);
  for (int m = 0; m < m_dl; ++m) t.pilot_residual += a.p_max * a.beta(m) * f.pilot_dl2(l, m);
  t.noise = noise_power;
  return t;
}

SinrTerms uplink_terms(const LinkFeatures& f, const PowerAllocation& a, int k, double noise_power) {
  const int m_dl = static_cast<int>(f.cross_ul.size());
  const int k_ul = static_cast<int>(a.p_ul.size());
  const int k_dl = static_cast<int>(a.alpha.cols());
  SinrTerms t;
  for (int i = 0; i < k_ul; ++i) (i == k ? t.signal : t.inter_user) += a.p_ul(i) * f.combiner_gain2(k, i);
  for (int l = 0; l < k_dl; ++l) {
    std::complex<double> residual = 0.0;
    for (int m = 0; m < m_dl; ++m) residual += std::sqrt(a.p_max * a.alpha(m, l)) * f.cross_ul[m](k, l);
    t.cross_link += std::norm(residual);
  }
  for (int m = 0; m < m_dl; ++m) t.pilot_residual += a.p_max * a.beta(m) * f.pilot_ul2(k, m);
  t.noise = noise_power * f.combiner_norm2(k);
  return t;
}

SinrTerms downlink_sinr_terms(const ChannelSet& channels, const BeamSet& beams, const PowerAllocation& alloc,
                              int l, const FadingParams& params, NumeratorMode mode) {
  return downlink_terms(extract_features(channels, beams), alloc, l, params.sigma2_dl, mode);
}

SinrTerms uplink_sinr_terms(const ChannelSet& channels, const BeamSet& beams, const PowerAllocation& alloc, int k,
                            const FadingParams& params) {
  return uplink_terms(extract_features(channels, beams), alloc, k, params.sigma2_ul);
}

double downlink_sinr(const ChannelSet& channels, const BeamSet& beams, const PowerAllocation& alloc, int l,
                     const FadingParams& params, NumeratorMode mode) {
  return downlink_sinr_terms(channels, beams, alloc, l, params, mode).sinr();
}

double uplink_sinr(const ChannelSet& channels, const BeamSet& beams, const PowerAllocation& alloc, int k,
                   const FadingParams& params) {
  return uplink_sinr_terms(channels, beams, alloc, k, params).sinr();
}

RateReport rates_from_sinr(const std::vector<Eigen::VectorXd>& dl_sinr, const std::vector<Eigen::VectorXd>& ul_sinr,
                           const RateWeights& weights) {
  const std::size_t trials = dl_sinr.size();
  if (trials == 0 || ul_sinr.size() != trials) throw std::invalid_argument("rates_from_sinr: need >= 1 trial");
  RateReport report;
  report.trials = static_cast<int>(trials);
  report.r_dl = Eigen::VectorXd::Zero(dl_sinr.front().size());
  report.r_ul = Eigen::VectorXd::Zero(ul_sinr.front().size());
  std::vector<double> f1(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const Eigen::VectorXd rd = dl_sinr[t].unaryExpr([](double g) { return std::log2(1.0 + g); });
    const Eigen::VectorXd ru = ul_sinr[t].unaryExpr([](double g) { return std::log2(1.0 + g); });
    report.r_dl += rd;
    report.r_ul += ru;
    f1[t] = weights.downlink * rd.sum() + weights.uplink * ru.sum();
  }
  report.r_dl /= double(trials);
  report.r_ul /= double(trials);
  double mean = 0.0;
  for (double v : f1) mean += v;
  mean /= double(trials);
  report.f1 = weights.downlink * report.r_dl.sum() + weights.uplink * report.r_ul.sum();
  if (trials > 1) {
    double ss = 0.0;
    for (double v : f1) ss += (v - mean) * (v - mean);
    report.std_err = std::sqrt(ss / double(trials - 1) / double(trials));
  }
  return report;
}

RateEvaluator::RateEvaluator(const NetworkLayout& layout, const CommModel& model, const MonteCarloSpec& mc)
    : model_(model), m_dl_(layout.m_dl()), k_dl_(layout.k_dl()), k_ul_(layout.k_ul()) {
  if (mc.trials < 1) throw std::invalid_argument("Monte Carlo trials must be >= 1");
  validate(model.fading);
  features_.resize(mc.trials);
  parallel_for(features_.size(), mc.threads, [&](std::size_t t) {
    const ChannelSet ch = draw_realization(layout, model.fading, derive_seed(mc.seed, {t}));
    features_[t] = extract_features(ch, compute_beams(layout, ch, model.beams));
  });
}

RateReport RateEvaluator::evaluate(const PowerAllocation& alloc, const RateWeights& weights) const {
  validate(alloc, m_dl_, k_dl_, k_ul_);
  std::vector<Eigen::VectorXd> dl(features_.size()), ul(features_.size());
  for (std::size_t t = 0; t < features_.size(); ++t) {
    dl[t].resize(k_dl_);
    ul[t].resize(k_ul_);
    for (int l = 0; l < k_dl_; ++l)
      dl[t](l) = downlink_terms(features_[t], alloc, l, model_.fading.sigma2_dl, model_.numerator).sinr();
    for (int k = 0; k < k_ul_; ++k) ul[t](k) = uplink_terms(features_[t], alloc, k, model_.fading.sigma2_ul).sinr();
  }
  return rates_from_sinr(dl, ul, weights);
}

RateReport ergodic_rates(const NetworkLayout& layout, const CommModel& model, const PowerAllocation& alloc,
                         const RateWeights& weights, const MonteCarloSpec& mc) {
  return RateEvaluator(layout, model, mc).evaluate(alloc, weights);
}

}  // namespace nafd
