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

#include "nafd/beamforming.hpp"
#include "nafd/channel.hpp"
#include "nafd/comm.hpp"
#include "nafd/geometry.hpp"
#include "nafd/sensing.hpp"

namespace nafd {

enum class DeploymentKind { kCircle, kRandom };

/// Every physical and numerical knob of one simulated system. Defaults are
/// the reference deployment: 16 RRUs on a 200 m circle, 16 antennas, 3 + 3
/// users in a 300 m region, 3.5 GHz, 1 MHz, 1 W.
struct ScenarioConfig {
  DeploymentKind deployment = DeploymentKind::kCircle;
  int m_total = 16;
  int n_antennas = 16;
  int k_ul = 3;
  int k_dl = 3;
  double circle_radius = 200.0;
  double region_radius = 300.0;

  double carrier_hz = 3.5e9;
  double bandwidth_hz = 1e6;
  double p_max = 1.0;  ///< W per DL-RRU
  double p_ul = 0.2;   ///< W per UL user
  FadingParams fading;
  double gain_tx = 1.0;
  double gain_rx = 1.0;
  double rcs = 1.0;
  double sigma2_n = dbm_to_watt(-105.0);

  NumeratorMode numerator = NumeratorMode::kLiteral;
  CombinerMode combiner = CombinerMode::kZf;
  Position prior_offset = Position::Zero();
  RateWeights rate_weights;
  SensingWeights sensing_weights;

  int trials = 200;
  std::uint64_t seed = 1;  ///< master seed; layout and channel seeds derive from it
  unsigned threads = 1;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const ScenarioConfig& config);

NetworkLayout make_layout(const ScenarioConfig& config);

/// One evaluated power allocation.
struct PerformancePoint {
  double f1 = 0.0;
  double f2 = 0.0;
  double speb = 0.0;
  double soeb = 0.0;
  double rate_std_err = 0.0;
  bool observable = true;
  Eigen::VectorXd r_dl;
  Eigen::VectorXd r_ul;
  Eigen::VectorXd genes;
  PowerAllocation alloc;
};

/// A deployment plus everything needed to score allocations on it. Monte
/// Carlo draws are fixed at construction (common random numbers), so
/// evaluate() is a deterministic function of the allocation.
class IsacScenario {
 public:
  explicit IsacScenario(const ScenarioConfig& config);
  IsacScenario(const ScenarioConfig& config, NetworkLayout layout);

  const ScenarioConfig& config() const { return config_; }
  const NetworkLayout& layout() const { return layout_; }
  const RadarParams& radar() const { return radar_; }
  const CommModel& comm_model() const { return comm_; }
  /// Beams of the reference realization; they define the power constraint
  /// and the gene <-> factor mapping.
  const BeamSet& reference_beams() const { return reference_beams_; }
  const RateEvaluator& rate_evaluator() const { return evaluator_; }
  const Eigen::VectorXd& p_ul() const { return p_ul_; }

  int m_dl() const { return layout_.m_dl(); }
  int k_dl() const { return layout_.k_dl(); }
  int num_genes() const { return m_dl() * (k_dl() + 1); }

  /// Repairs and decodes genes.
  PowerAllocation allocation(const Eigen::VectorXd& genes) const;
  Eigen::VectorXd genes_of(const PowerAllocation& alloc) const;
  /// Equal split: every gene 1 / (K_dl + 1).
  Eigen::VectorXd epa_genes() const;

  RateReport rates(const PowerAllocation& alloc) const;
  SensingReport sensing(const PowerAllocation& alloc) const;
  PerformancePoint evaluate(const PowerAllocation& alloc) const;
  PerformancePoint evaluate_genes(const Eigen::VectorXd& genes) const { return evaluate(allocation(genes)); }

 private:
  ScenarioConfig config_;
  NetworkLayout layout_;
  RadarParams radar_;
  CommModel comm_;
  Eigen::VectorXd p_ul_;
  BeamSet reference_beams_;
  RateEvaluator evaluator_;
};

}  // namespace nafd
