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

#include <cstdint>

#include "nafd/geometry.hpp"

namespace nafd {

struct FadingParams {
  double alpha_dl = 3.7;  ///< DL-RRU -> DL user
  double alpha_ul = 3.7;  ///< UL user -> UL-RRU
  double alpha_t = 4.0;   ///< UL user -> DL user
  double alpha_i = 3.0;   ///< DL-RRU -> UL-RRU
  double sigma2_dl = dbm_to_watt(-83.0);
  double sigma2_ul = dbm_to_watt(-83.0);
  double sigma2_sp_dl = dbm_to_watt(-105.0);
  double sigma2_sp_ul = dbm_to_watt(-105.0);
  /// Optional reference distance d0 for (d/d0)^-alpha; 0 keeps raw d^-alpha.
  double reference_distance = 0.0;
};

void validate(const FadingParams& params);

/// Amplitude factor d^-alpha (power factor is its square).
double large_scale_gain(double d, double alpha, double reference_distance = 0.0);

/// truth = estimate + error, entry by entry.
struct SplitChannel {
  ComplexMatrix truth;
  ComplexMatrix estimate;
  ComplexMatrix error;
};

/// One Monte Carlo realization of every link. Per-RRU blocks are stacked
/// along rows in RRU order, N rows each.
struct ChannelSet {
  int n_antennas = 0;
  SplitChannel g_dl;  ///< (M_dl N) x K_dl, column l = g_dl,l
  SplitChannel g_ul;  ///< (M_ul N) x K_ul, column k = g_ul,k
  SplitChannel g_t;   ///< K_dl x K_ul, UL user k -> DL user l
  SplitChannel g_i;   ///< (M_ul N) x (M_dl N), block (n, m) = G_I from DL-RRU m to UL-RRU n

  auto dl_block(const ComplexMatrix& stacked, int m, int l) const {
    return stacked.block(static_cast<Eigen::Index>(m) * n_antennas, l, n_antennas, 1);
  }
  /// G_I columns belonging to DL-RRU m, all UL-RRUs stacked: (M_ul N) x N.
  auto cross_columns(const ComplexMatrix& stacked, int m) const {
    return stacked.middleCols(static_cast<Eigen::Index>(m) * n_antennas, n_antennas);
  }
};

/// True channels lambda^{1/2} h with h ~ CN(0, I). Estimates equal truth and
/// errors are zero until split_estimate_error is applied. Each link draws
/// from its own seeded sub-stream.
ChannelSet draw_channels(const NetworkLayout& layout, const FadingParams& params, std::uint64_t seed);

/// Adds CN(0, sigma2_sp_dl) errors to DL user channels and CN(0, sigma2_sp_ul)
/// errors to the RRU cross links; UL and user-to-user channels stay exact.
/// estimate = truth - error.
ChannelSet split_estimate_error(ChannelSet channels, const FadingParams& params, std::uint64_t seed);

/// draw_channels + split_estimate_error with sub-seeds derived from one seed.
ChannelSet draw_realization(const NetworkLayout& layout, const FadingParams& params, std::uint64_t seed);

}  // namespace nafd
