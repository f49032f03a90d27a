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

#include "nafd/sensing.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

namespace nafd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// B - A^2/N evaluated as the centered sum of squares (same value, never negative).
double centered_moment(const Eigen::Matrix2Xd& offsets, double angle) {
  const Eigen::VectorXd u = transverse_projection(offsets, angle);
  return (u.array() - u.mean()).square().sum();
}

void invert_information(double info, double& variance, bool& observable) {
  observable = info > 0.0 && std::isfinite(info);
  variance = observable ? 1.0 / info : kInf;
}

}  // namespace

void validate(const RadarParams& r) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(r.gain_tx, "gain_tx");
  positive(r.gain_rx, "gain_rx");
  positive(r.rcs, "rcs");
  if (!(r.bandwidth >= 0.0)) throw std::invalid_argument("bandwidth must be non-negative");
  positive(r.sigma2_n, "sigma2_n");
  positive(r.wavelength, "wavelength");
}

std::complex<double> complex_amplitude(const BistaticGeometry& g, const RadarParams& r) {
  if (!(g.d_m > 0.0) || !(g.d_n > 0.0)) throw std::domain_error("complex_amplitude: distances must be positive");
  const double four_pi_cubed = std::pow(4.0 * kPi, 3);
  const double magnitude =
      r.wavelength * r.wavelength * r.gain_tx * r.gain_rx * r.rcs / (four_pi_cubed * g.d_n * g.d_n * g.d_m * g.d_m);
  return std::polar(magnitude, -2.0 * kPi * (r.bandwidth / kSpeedOfLight) * g.d_nm);
}

InformationTerms information_terms(const NetworkLayout& layout, const PowerAllocation& alloc,
                                   const RadarParams& radar, const BeamSet& beams, int n) {
  if (n < 0 || n >= layout.m_ul()) throw std::out_of_range("information_terms: UL-RRU index out of range");
  const int m_dl = layout.m_dl();
  const double big_n = layout.n_antennas();
  const double lambda2 = radar.wavelength * radar.wavelength;
  const double range_scale = kPi * kPi * std::pow(radar.bandwidth / kSpeedOfLight, 2) * big_n * big_n;
  const double angle_scale = 4.0 * kPi * kPi * big_n / lambda2;
  InformationTerms t{Eigen::VectorXd(m_dl), Eigen::VectorXd(m_dl), Eigen::VectorXd(m_dl)};
  for (int m = 0; m < m_dl; ++m) {
    const BistaticGeometry g = bistatic_geometry(layout, m, n);
    const double eta2 = std::norm(complex_amplitude(g, radar));
    const double common = alloc.p_max * alloc.beta(m) * eta2 / radar.sigma2_n * beams.sensing_norm2(m);
    t.range(m) = common * range_scale;
    t.doa(m) = common * angle_scale * centered_moment(layout.ul_rrus[n].array.offsets, g.doa_theta);
    t.dod(m) = common * angle_scale * centered_moment(layout.dl_rrus[m].array.offsets, g.dod_phi);
  }
  return t;
}

CrlbVariances crlb_variances(const NetworkLayout& layout, const PowerAllocation& alloc, const RadarParams& radar,
                             const BeamSet& beams, int n) {
  const InformationTerms t = information_terms(layout, alloc, radar, beams, n);
  CrlbVariances v;
  invert_information(t.range.sum(), v.range, v.range_observable);
  invert_information(t.doa.sum(), v.doa, v.doa_observable);
  invert_information(t.dod.sum(), v.dod, v.dod_observable);
  return v;
}

Eigen::Vector3d echo_parameters(const NetworkLayout& layout, int n, int m) {
  const BistaticGeometry g = bistatic_geometry(layout, m, n);
  return {g.d_nm, g.doa_theta, g.dod_phi};
}

ComplexVector echo_signal(const NetworkLayout& layout, const PowerAllocation& alloc, const RadarParams& radar,
                          const BeamSet& beams, int n, int m, const Eigen::Vector3d& params, EchoModel model) {
  const BistaticGeometry truth = bistatic_geometry(layout, m, n);
  const double magnitude = std::abs(complex_amplitude(truth, radar));
  const std::complex<double> eta =
      std::polar(magnitude, -2.0 * kPi * (radar.bandwidth / kSpeedOfLight) * params(0));
  const ComplexVector b = steering_vector(layout.ul_rrus[n].array.offsets, params(1), layout.wavelength);
  const ComplexVector a = steering_vector(layout.dl_rrus[m].array.offsets, params(2), layout.wavelength);
  const double amplitude = std::sqrt(alloc.p_max * alloc.beta(m));
  if (model == EchoModel::kBeamformed) {
    const std::complex<double> tx_gain = a.transpose() * beams.w_s.col(m);
    return amplitude * eta * tx_gain * b;
  }
  ComplexVector r(b.size() * a.size());
  for (Eigen::Index j = 0; j < b.size(); ++j) r.segment(j * a.size(), a.size()) = b(j) * a;
  return (amplitude * std::sqrt(beams.sensing_norm2(m)) * eta) * r;
}

namespace {

Eigen::Matrix3d assemble_fim(const NetworkLayout& layout, const PowerAllocation& alloc, const RadarParams& radar,
                             const BeamSet& beams, int n, const FiniteDifferenceSteps& steps, EchoModel model) {
  Eigen::Matrix3d fim = Eigen::Matrix3d::Zero();
  const Eigen::Vector3d h(steps.range, steps.angle, steps.angle);
  for (int m = 0; m < layout.m_dl(); ++m) {
    const Eigen::Vector3d gamma = echo_parameters(layout, n, m);
    ComplexMatrix jac;
    for (int p = 0; p < 3; ++p) {
      const Eigen::Vector3d dp = h(p) * Eigen::Vector3d::Unit(p);
      const ComplexVector col = (echo_signal(layout, alloc, radar, beams, n, m, gamma + dp, model) -
                                 echo_signal(layout, alloc, radar, beams, n, m, gamma - dp, model)) /
                                (2.0 * h(p));
      if (p == 0) jac.resize(col.size(), 3);
      jac.col(p) = col;
    }
    fim += (jac.adjoint() * jac).real();
  }
  return fim / radar.sigma2_n;
}

}  // namespace

FimOracle numeric_fim_oracle(const NetworkLayout& layout, const PowerAllocation& alloc, const RadarParams& radar,
                             const BeamSet& beams, int n, const FiniteDifferenceSteps& steps, EchoModel model,
                             double consistency_tolerance) {
  if (!(steps.range > 0.0) || !(steps.angle > 0.0)) throw std::invalid_argument("finite-difference steps must be positive");
  FimOracle out;
  out.fim = assemble_fim(layout, alloc, radar, beams, n, steps, model);
  out.fim_half_step = assemble_fim(layout, alloc, radar, beams, n, {steps.range / 2, steps.angle / 2}, model);
  for (int i = 0; i < 3; ++i) {
    const double ref = std::abs(out.fim_half_step(i, i));
    if (ref > 0.0)
      out.max_relative_change = std::max(out.max_relative_change, std::abs(out.fim(i, i) - ref) / ref);
  }
  out.step_consistent = out.max_relative_change <= consistency_tolerance;
  if (!out.step_consistent) {
    std::clog << "warning: numeric FIM changed by " << out.max_relative_change
              << " (relative) when halving the step; steps may be too large.\n  step estimate:\n"
              << out.fim << "\n  half-step estimate:\n"
              << out.fim_half_step << '\n';
  }
  return out;
}

SensingReport aggregate_errors(const std::vector<CrlbVariances>& per_rru, const SensingWeights& weights) {
  if (per_rru.empty()) throw std::invalid_argument("aggregate_errors: need at least one UL-RRU");
  const auto count = static_cast<Eigen::Index>(per_rru.size());
  SensingReport r;
  r.sigma2_d.resize(count);
  r.sigma2_theta.resize(count);
  r.sigma2_phi.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& v = per_rru[i];
    r.sigma2_d(i) = v.range;
    r.sigma2_theta(i) = v.doa;
    r.sigma2_phi(i) = v.dod;
    r.observable = r.observable && v.range_observable && v.doa_observable && v.dod_observable;
  }
  r.speb = r.sigma2_d.mean();
  r.soeb = (r.sigma2_theta + r.sigma2_phi).mean();
  // Zero-weight terms drop out so an unobservable but unweighted metric
  // does not poison f2.
  double weighted = 0.0;
  if (weights.position != 0.0) weighted += weights.position * r.speb;
  if (weights.orientation != 0.0) weighted += weights.orientation * r.soeb;
  r.f2 = (std::isfinite(weighted) && weighted > 0.0) ? 1.0 / weighted : 0.0;
  return r;
}

SensingReport evaluate_sensing(const NetworkLayout& layout, const PowerAllocation& alloc, const RadarParams& radar,
                               const BeamSet& beams, const SensingWeights& weights) {
  std::vector<CrlbVariances> per_rru;
  per_rru.reserve(layout.m_ul());
  for (int n = 0; n < layout.m_ul(); ++n) per_rru.push_back(crlb_variances(layout, alloc, radar, beams, n));
  return aggregate_errors(per_rru, weights);
}

}  // namespace nafd
