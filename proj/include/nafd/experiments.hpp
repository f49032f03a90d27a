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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nafd/dqn.hpp"
#include "nafd/moo.hpp"
#include "nafd/scenario.hpp"

namespace nafd {

/// Every RRU splits its budget equally over its data streams and the pilot;
/// the constraint is tight.
PowerAllocation epa_allocation(const BeamSet& beams, int k_dl, double p_max, const Eigen::VectorXd& p_ul);

/// Genes with the pilot share fixed and data shares splitting the remainder
/// equally, or the reverse.
enum class SweepVariable { kBeta, kAlpha };
Eigen::VectorXd sweep_genes(SweepVariable variable, double value, int m_dl, int k_dl);

// ------------------------------------------------------------------ contour

struct GridSpec {
  double x_min = -300.0, x_max = 300.0;
  double y_min = -300.0, y_max = 300.0;
  int nx = 61, ny = 61;
};

struct ContourSettings {
  double pilot_share = 0.25;  ///< beta_m ||w^s_m||^2; data shares take the EPA remainder
  double p_max = 1.0;
  Position prior_offset = Position::Zero();
  RadarParams radar;
  SensingWeights weights;
};

struct ContourCell {
  int ix = 0, iy = 0;
  Position point = Position::Zero();
  bool masked = false;  ///< target would sit on an RRU
  double speb = 0.0;
  double soeb = 0.0;
};

struct ContourResult {
  GridSpec grid;
  std::vector<ContourCell> cells;  ///< row-major, x fastest
};

/// Sensing metrics with the target at `target` and the sensing beams aimed
/// at it (plus the prior offset).
SensingReport sensing_at_target(const NetworkLayout& layout, const Position& target, const ContourSettings& settings);

ContourResult run_contour(const NetworkLayout& layout, const GridSpec& grid, const ContourSettings& settings,
                          unsigned threads = 1);

// ------------------------------------------------------------------- sweeps

struct SweepPoint {
  SweepVariable variable = SweepVariable::kBeta;
  double value = 0.0;
  int n_antennas = 0;
  PerformancePoint point;
};

/// One series per antenna count; each count gets its own scenario built from
/// `base` (or `layout`, when given) with only the antenna count changed.
std::vector<SweepPoint> run_power_sweep(const ScenarioConfig& base, SweepVariable variable,
                                        const std::vector<double>& values, const std::vector<int>& n_antennas,
                                        const std::optional<NetworkLayout>& layout = std::nullopt);

// ------------------------------------------------------ scheme comparison

/// Disjoint time fractions of one coherent block. t_joint is simultaneous
/// UL and DL; the proposed scheme also senses during it.
struct SchemeSpec {
  std::string name;
  double t_sense = 0.0;
  double t_ul = 0.0;
  double t_dl = 0.0;
  double t_joint = 0.0;
  int sensing_symbols = 0;
};

void validate(const SchemeSpec& spec);

struct SchemeRow {
  SchemeSpec spec;
  double rate_dl = 0.0;
  double rate_ul = 0.0;
  double sum_rate = 0.0;
  double speb = 0.0;
  double soeb = 0.0;
};

inline const std::string kProposedScheme = "NAFD-ISAC";
inline const std::string kTddIsac = "TDD-ISAC";
inline const std::string kTddNafd = "TDD-NAFD-ISAC";

/// For every sensing symbol count s: the two TDD baselines with a dedicated
/// full-power sensing slot of s symbols, and the proposed scheme sensing with
/// its EPA pilots over all `block_symbols`.
std::vector<SchemeRow> compare_schemes(const IsacScenario& scenario, const std::vector<int>& sensing_symbols,
                                       int block_symbols);

// ------------------------------------------------------------------- pareto

Nsga2Problem make_nsga2_problem(const IsacScenario& scenario);

struct ParetoRun {
  int n_antennas = 0;
  ParetoFront front;
  std::vector<PerformancePoint> members;  ///< front members re-evaluated, sorted by f1
  PerformancePoint epa;
  std::optional<PerformancePoint> dqn;
};

ParetoRun run_pareto(const IsacScenario& scenario, const Nsga2Config& nsga, const DqnConfig* dqn = nullptr);

// ---------------------------------------------------------------- writers

void write_points_csv(const std::filesystem::path& path, const std::vector<std::string>& labels,
                      const std::vector<PerformancePoint>& points);
void write_contour_csv(const std::filesystem::path& path, const ContourResult& result);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points);
void write_schemes_csv(const std::filesystem::path& path, const std::vector<SchemeRow>& rows);
void write_pareto_csv(const std::filesystem::path& path, const std::vector<ParetoRun>& runs);
/// One row per UL-RRU.
void write_sensing_csv(const std::filesystem::path& path, const SensingReport& report);
void write_history_csv(const std::filesystem::path& path, const std::vector<ParetoRun>& runs);
void write_dqn_csv(const std::filesystem::path& trace_path, const std::filesystem::path& steps_path,
                   const DqnResult& result);

std::string to_string(SweepVariable variable);

}  // namespace nafd
