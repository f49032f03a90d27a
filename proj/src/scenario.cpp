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

#include "nafd/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nafd/moo.hpp"
#include "nafd/rng.hpp"

namespace nafd {
namespace {

enum SeedKey : std::uint64_t { kLayoutSeed = 0x10, kMonteCarloSeed = 0x20, kReferenceSeed = 0x30 };

RadarParams radar_of(const ScenarioConfig& c) {
  RadarParams r;
  r.gain_tx = c.gain_tx;
  r.gain_rx = c.gain_rx;
  r.rcs = c.rcs;
  r.bandwidth = c.bandwidth_hz;
  r.sigma2_n = c.sigma2_n;
  r.wavelength = wavelength_from_frequency(c.carrier_hz);
  return r;
}

}  // namespace

void validate(const ScenarioConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(c.m_total >= 2 && c.m_total % 2 == 0, "m_total must be even and >= 2");
  require(c.n_antennas >= 1, "n_antennas must be >= 1");
  require(c.k_ul >= 0, "k_ul must be >= 0");
  require(c.k_dl >= 1, "k_dl must be >= 1");
  require(c.circle_radius > 0.0, "circle_radius must be positive");
  require(c.region_radius > 0.0, "region_radius must be positive");
  require(c.carrier_hz > 0.0, "carrier_hz must be positive");
  require(c.bandwidth_hz >= 0.0, "bandwidth_hz must be non-negative");
  require(c.p_max > 0.0, "p_max must be positive");
  require(c.p_ul >= 0.0, "p_ul must be non-negative");
  require(c.gain_tx > 0.0, "gain_tx must be positive");
  require(c.gain_rx > 0.0, "gain_rx must be positive");
  require(c.rcs > 0.0, "rcs must be positive");
  require(c.sigma2_n > 0.0, "sigma2_n must be positive");
  require(c.trials >= 1, "trials must be >= 1");
  require(c.rate_weights.downlink >= 0.0 && c.rate_weights.uplink >= 0.0, "rate weights must be non-negative");
  require(c.sensing_weights.position >= 0.0 && c.sensing_weights.orientation >= 0.0,
          "sensing weights must be non-negative");
  validate(c.fading);
}

NetworkLayout make_layout(const ScenarioConfig& c) {
  validate(c);
  const std::uint64_t seed = derive_seed(c.seed, {kLayoutSeed});
  const double lambda = wavelength_from_frequency(c.carrier_hz);
  if (c.deployment == DeploymentKind::kCircle)
    return make_circle_deployment(c.m_total, c.circle_radius, c.k_ul, c.k_dl, c.region_radius, seed, c.n_antennas,
                                  lambda);
  return make_random_deployment(c.m_total, c.k_ul, c.k_dl, c.region_radius, seed, c.n_antennas, lambda);
}

IsacScenario::IsacScenario(const ScenarioConfig& config) : IsacScenario(config, make_layout(config)) {}

IsacScenario::IsacScenario(const ScenarioConfig& config, NetworkLayout layout)
    : config_(config),
      layout_(std::move(layout)),
      radar_(radar_of(config)),
      comm_{config.fading, BeamPolicy{config.combiner, config.prior_offset}, config.numerator},
      p_ul_(Eigen::VectorXd::Constant(layout_.k_ul(), config.p_ul)),
      reference_beams_(compute_beams(
          layout_, draw_realization(layout_, config.fading, derive_seed(config.seed, {kReferenceSeed})), comm_.beams)),
      evaluator_(layout_, comm_, MonteCarloSpec{config.trials, derive_seed(config.seed, {kMonteCarloSeed}), config.threads}) {
  validate(config_);
  validate_layout(layout_);
  validate(radar_);
}

PowerAllocation IsacScenario::allocation(const Eigen::VectorXd& genes) const {
  return repair_to_constraint(genes, reference_beams_, config_.p_max, p_ul_);
}

Eigen::VectorXd IsacScenario::genes_of(const PowerAllocation& alloc) const {
  return encode_genes(alloc, reference_beams_);
}

Eigen::VectorXd IsacScenario::epa_genes() const {
  return Eigen::VectorXd::Constant(num_genes(), 1.0 / (k_dl() + 1));
}

RateReport IsacScenario::rates(const PowerAllocation& alloc) const {
  return evaluator_.evaluate(alloc, config_.rate_weights);
}

SensingReport IsacScenario::sensing(const PowerAllocation& alloc) const {
  return evaluate_sensing(layout_, alloc, radar_, reference_beams_, config_.sensing_weights);
}

PerformancePoint IsacScenario::evaluate(const PowerAllocation& alloc) const {
  const RateReport r = rates(alloc);
  const SensingReport s = sensing(alloc);
  PerformancePoint p;
  p.f1 = r.f1;
  p.rate_std_err = r.std_err;
  p.r_dl = r.r_dl;
  p.r_ul = r.r_ul;
  p.f2 = s.f2;
  p.speb = s.speb;
  p.soeb = s.soeb;
  p.observable = s.observable;
  p.alloc = alloc;
  p.genes = genes_of(alloc);
  return p;
}

}  // namespace nafd
