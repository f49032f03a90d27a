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

#include "nafd/beamforming.hpp"

#include <cmath>

namespace nafd {

ComplexMatrix zf_data_beams(const ComplexMatrix& g_dl_estimate, double max_condition) {
  return zero_forcing_directions(g_dl_estimate, max_condition);
}

ComplexMatrix conjugate_sensing_beams(const NetworkLayout& layout, const Position& prior_target) {
  const int n = layout.n_antennas();
  ComplexMatrix w(n, layout.m_dl());
  for (int m = 0; m < layout.m_dl(); ++m) {
    const Rru& rru = layout.dl_rrus[m];
    const Position dir = prior_target - rru.center;
    const double phi = std::atan2(dir.y(), dir.x());
    const ComplexVector a = steering_vector(rru.array.offsets, phi, layout.wavelength);
    w.col(m) = a.conjugate() / a.norm();
  }
  return w;
}

ComplexMatrix uplink_combiners(const ComplexMatrix& g_ul_estimate, CombinerMode mode, double max_condition) {
  if (mode == CombinerMode::kZf) return zero_forcing_directions(g_ul_estimate, max_condition);
  ComplexMatrix v = g_ul_estimate;
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double norm = v.col(k).norm();
    if (!(norm > 0.0)) throw std::domain_error("MRC combiner: zero uplink channel");
    v.col(k) /= norm;
  }
  return v;
}

BeamSet compute_beams(const NetworkLayout& layout, const ChannelSet& channels, const BeamPolicy& policy) {
  BeamSet beams;
  beams.n_antennas = channels.n_antennas;
  beams.w_c = zf_data_beams(channels.g_dl.estimate);
  beams.w_s = conjugate_sensing_beams(layout, layout.target + policy.prior_offset);
  beams.v = uplink_combiners(channels.g_ul.estimate, policy.combiner);
  return beams;
}

}  // namespace nafd
