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

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/SVD>

#include "nafd/channel.hpp"
#include "nafd/geometry.hpp"

namespace nafd {

enum class CombinerMode { kMrc, kZf };

inline constexpr double kDefaultMaxCondition = 1e12;

/// Column-normalized zero-forcing directions G (G^H G)^{-1} for a tall channel
/// matrix G (one user per column). Computed through the thin SVD,
/// G (G^H G)^{-1} = U S^{-1} V^H.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> zero_forcing_directions(
    const Eigen::MatrixBase<Derived>& channels, double max_condition = kDefaultMaxCondition) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (channels.cols() == 0) return Matrix(channels.rows(), 0);
  if (channels.rows() < channels.cols())
    throw std::invalid_argument("zero forcing needs at least as many antennas as users");
  // ZF directions do not change when a user's channel is rescaled, so unit
  // columns cost nothing and remove the path-loss spread from the conditioning.
  const auto norms = channels.colwise().norm().eval();
  if (!(norms.minCoeff() > 0.0)) throw std::domain_error("zero forcing: a user channel is identically zero");
  const Matrix unit = channels * norms.cwiseInverse().template cast<typename Derived::Scalar>().asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(unit, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s(0), smin = s(s.size() - 1);
  if (!(smin > 0.0) || smax / smin > max_condition)
    throw std::domain_error("zero forcing: channel matrix rank deficient (condition number above " +
                            std::to_string(max_condition) + ")");
  Matrix w = svd.matrixU() * s.cwiseInverse().asDiagonal() * svd.matrixV().adjoint();
  w.colwise().normalize();
  return w;
}

/// Beams for one channel realization.
struct BeamSet {
  int n_antennas = 0;
  ComplexMatrix w_c;  ///< (M_dl N) x K_dl data beams, unit stacked norm per user
  ComplexMatrix w_s;  ///< N x M_dl sensing beams, unit norm per RRU
  ComplexMatrix v;    ///< (M_ul N) x K_ul receive combiners, unit norm

  int m_dl() const { return static_cast<int>(w_s.cols()); }
  int k_dl() const { return static_cast<int>(w_c.cols()); }

  auto data_block(int m, int i) const {
    return w_c.block(static_cast<Eigen::Index>(m) * n_antennas, i, n_antennas, 1);
  }
  /// ||w^c_{i,m}||^2
  double data_norm2(int m, int i) const { return data_block(m, i).squaredNorm(); }
  /// ||w^s_m||^2
  double sensing_norm2(int m) const { return w_s.col(m).squaredNorm(); }
};

/// ZF downlink beams from the stacked estimated DL channel (M_dl N) x K_dl.
ComplexMatrix zf_data_beams(const ComplexMatrix& g_dl_estimate, double max_condition = kDefaultMaxCondition);

/// w_s[m] = conj(a_m) / ||a_m||, a_m aimed from DL-RRU m at `prior_target`.
ComplexMatrix conjugate_sensing_beams(const NetworkLayout& layout, const Position& prior_target);
inline ComplexMatrix conjugate_sensing_beams(const NetworkLayout& layout) {
  return conjugate_sensing_beams(layout, layout.target);
}

/// Unit-norm UL receive combiners, MRC or ZF over the stacked UL estimate.
ComplexMatrix uplink_combiners(const ComplexMatrix& g_ul_estimate, CombinerMode mode,
                               double max_condition = kDefaultMaxCondition);

struct BeamPolicy {
  CombinerMode combiner = CombinerMode::kZf;
  /// Offset of the a priori target position from the true target (m).
  Position prior_offset = Position::Zero();
};

BeamSet compute_beams(const NetworkLayout& layout, const ChannelSet& channels, const BeamPolicy& policy = {});

}  // namespace nafd
