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

#include <complex>
#include <vector>

#include "nafd/beamforming.hpp"
#include "nafd/comm.hpp"
#include "nafd/geometry.hpp"

namespace nafd {

struct RadarParams {
  double gain_tx = 1.0;                       ///< G_t
  double gain_rx = 1.0;                       ///< G_r
  double rcs = 1.0;                           ///< target radar cross-section (m^2)
  double bandwidth = 1e6;                     ///< Delta f (Hz)
  double sigma2_n = dbm_to_watt(-105.0);      ///< sensing noise power per UL-RRU (W)
  double wavelength = kDefaultWavelength;     ///< lambda (m)
};

void validate(const RadarParams& radar);

/// eta = lambda^2 G_t G_r sigma / ((4 pi)^3 d_n^2 d_m^2) * exp(-j 2 pi (Delta f / c) d_nm).
/// The range-rate term is dropped (static target).
std::complex<double> complex_amplitude(const BistaticGeometry& geom, const RadarParams& radar);

/// Per-parameter error bounds at one UL-RRU. Unobservable parameters carry
/// +infinity and clear the matching flag; the infinity is assigned, never the
/// result of a division by zero.
struct CrlbVariances {
  double range = 0.0;  ///< sigma^2_d (m^2)
  double doa = 0.0;    ///< sigma^2_theta (rad^2)
  double dod = 0.0;    ///< sigma^2_phi (rad^2)
  bool range_observable = true;
  bool doa_observable = true;
  bool dod_observable = true;
};

/// Per-DL-RRU summands of the three CRLB denominators at UL-RRU n.
struct InformationTerms {
  Eigen::VectorXd range;
  Eigen::VectorXd doa;
  Eigen::VectorXd dod;
};

InformationTerms information_terms(const NetworkLayout& layout, const PowerAllocation& alloc,
                                   const RadarParams& radar, const BeamSet& beams, int n);

/// Closed-form bounds:
///   sigma^2_d     = 1 / sum_m p beta_m pi^2 (Df/c)^2 |eta|^2 N^2 / sigma^2_n ||w^s_m||^2
///   sigma^2_theta = 1 / sum_m p beta_m 4 pi^2 |eta|^2 N (B_n - A_n^2/N) / (lambda^2 sigma^2_n) ||w^s_m||^2
///   sigma^2_phi   = same with the transmit-array moments A_m, B_m.
CrlbVariances crlb_variances(const NetworkLayout& layout, const PowerAllocation& alloc, const RadarParams& radar,
                             const BeamSet& beams, int n);

/// Echo models for the numeric FIM.
enum class EchoModel {
  /// r = sqrt(p beta) ||w^s|| eta (b_n kron a_m): every transmit/receive
  /// element pair is resolvable (N^2 samples). Reproduces the closed forms.
  kVirtualArray,
  /// r = sqrt(p beta) eta b_n (a_m^T w^s): transmit array collapsed by the
  /// fixed sensing beam (N samples).
  kBeamformed,
};

/// Noise-free separated pilot from DL-RRU m at UL-RRU n, as a function of
/// (d_nm, theta_n, phi_m). |eta| stays at its true-geometry value.
ComplexVector echo_signal(const NetworkLayout& layout, const PowerAllocation& alloc, const RadarParams& radar,
                          const BeamSet& beams, int n, int m, const Eigen::Vector3d& params,
                          EchoModel model = EchoModel::kVirtualArray);

/// True (d_nm, theta_n, phi_m) for the pair (m, n).
Eigen::Vector3d echo_parameters(const NetworkLayout& layout, int n, int m);

struct FiniteDifferenceSteps {
  double range = 1e-2;  ///< m
  double angle = 1e-6;  ///< rad
};

struct FimOracle {
  Eigen::Matrix3d fim;            ///< central differences at the given steps
  Eigen::Matrix3d fim_half_step;  ///< same with halved steps
  double max_relative_change = 0.0;
  bool step_consistent = true;
};

/// J = Re sum_m (dr_m/dgamma)^H (dr_m/dgamma) / sigma^2_n with gamma =
/// (d_nm, theta_n, phi_m), derivatives by central differences. When the
/// diagonal moves by more than `consistency_tolerance` between the two step
/// sizes a warning carrying both estimates is written to std::clog.
FimOracle numeric_fim_oracle(const NetworkLayout& layout, const PowerAllocation& alloc, const RadarParams& radar,
                             const BeamSet& beams, int n, const FiniteDifferenceSteps& steps = {},
                             EchoModel model = EchoModel::kVirtualArray, double consistency_tolerance = 1e-6);

struct SensingWeights {
  double position = 1.0;     ///< omega_sp
  double orientation = 1.0;  ///< omega_so
};

struct SensingReport {
  Eigen::VectorXd sigma2_d;
  Eigen::VectorXd sigma2_theta;
  Eigen::VectorXd sigma2_phi;
  double speb = 0.0;  ///< mean of sigma2_d
  double soeb = 0.0;  ///< mean of sigma2_theta + sigma2_phi
  double f2 = 0.0;    ///< 1 / (omega_sp speb + omega_so soeb); 0 when unobservable
  bool observable = true;
};

SensingReport aggregate_errors(const std::vector<CrlbVariances>& per_rru, const SensingWeights& weights);

SensingReport evaluate_sensing(const NetworkLayout& layout, const PowerAllocation& alloc, const RadarParams& radar,
                               const BeamSet& beams, const SensingWeights& weights = {});

}  // namespace nafd
