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

#include "nafd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "nafd/csv.hpp"
#include "nafd/parallel.hpp"

namespace nafd {
namespace {

constexpr double kFractionTolerance = 1e-12;

PowerAllocation pilot_only_allocation(const BeamSet& beams, int k_dl, int k_ul, double pilot_share, double p_max) {
  PowerAllocation a;
  a.alpha = Eigen::MatrixXd::Zero(beams.m_dl(), k_dl);
  a.beta.resize(beams.m_dl());
  for (int m = 0; m < beams.m_dl(); ++m) a.beta(m) = pilot_share / beams.sensing_norm2(m);
  a.p_max = p_max;
  a.p_ul = Eigen::VectorXd::Zero(k_ul);
  return a;
}

std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace

PowerAllocation epa_allocation(const BeamSet& beams, int k_dl, double p_max, const Eigen::VectorXd& p_ul) {
  const Eigen::VectorXd genes = Eigen::VectorXd::Constant(beams.m_dl() * (k_dl + 1), 1.0 / (k_dl + 1));
  return decode_genes(genes, beams, p_max, p_ul);
}

Eigen::VectorXd sweep_genes(SweepVariable variable, double value, int m_dl, int k_dl) {
  if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument("sweep value must lie in [0, 1]");
  const double pilot = variable == SweepVariable::kBeta ? value : 1.0 - value;
  const double data = (1.0 - pilot) / k_dl;
  Eigen::VectorXd g(m_dl * (k_dl + 1));
  for (int m = 0; m < m_dl; ++m) {
    for (int i = 0; i < k_dl; ++i) g(data_gene(m, i, k_dl)) = data;
    g(pilot_gene(m, k_dl)) = pilot;
  }
  return g;
}

std::string to_string(SweepVariable v) { return v == SweepVariable::kBeta ? "beta" : "alpha"; }

// ------------------------------------------------------------------ contour

SensingReport sensing_at_target(const NetworkLayout& layout, const Position& target, const ContourSettings& s) {
  const NetworkLayout placed = with_target(layout, target);
  BeamSet beams;
  beams.n_antennas = placed.n_antennas();
  beams.w_s = conjugate_sensing_beams(placed, target + s.prior_offset);
  // Sensing depends on the pilot factors only; the data shares are implied.
  const PowerAllocation alloc = pilot_only_allocation(beams, placed.k_dl(), placed.k_ul(), s.pilot_share, s.p_max);
  return evaluate_sensing(placed, alloc, s.radar, beams, s.weights);
}

ContourResult run_contour(const NetworkLayout& layout, const GridSpec& grid, const ContourSettings& settings,
                          unsigned threads) {
  if (grid.nx < 1 || grid.ny < 1) throw std::invalid_argument("contour grid needs at least one cell per axis");
  if (!(grid.x_max >= grid.x_min && grid.y_max >= grid.y_min)) throw std::invalid_argument("contour grid bounds are inverted");
  if (!(settings.pilot_share > 0.0 && settings.pilot_share <= 1.0))
    throw std::invalid_argument("contour pilot_share must lie in (0, 1]");

  ContourResult result;
  result.grid = grid;
  result.cells.resize(static_cast<std::size_t>(grid.nx) * grid.ny);
  auto coord = [](double lo, double hi, int n, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); };

  parallel_for(result.cells.size(), threads, [&](std::size_t idx) {
    ContourCell& c = result.cells[idx];
    c.ix = static_cast<int>(idx % grid.nx);
    c.iy = static_cast<int>(idx / grid.nx);
    c.point = Position(coord(grid.x_min, grid.x_max, grid.nx, c.ix), coord(grid.y_min, grid.y_max, grid.ny, c.iy));
    for (const auto* rrus : {&layout.dl_rrus, &layout.ul_rrus})
      for (const Rru& r : *rrus)
        if ((r.center - c.point).norm() < kMinSeparation) c.masked = true;
    if (c.masked) {
      c.speb = c.soeb = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    const SensingReport rep = sensing_at_target(layout, c.point, settings);
    c.speb = rep.speb;
    c.soeb = rep.soeb;
  });
  return result;
}

// ------------------------------------------------------------------- sweeps

std::vector<SweepPoint> run_power_sweep(const ScenarioConfig& base, SweepVariable variable,
                                        const std::vector<double>& values, const std::vector<int>& n_antennas,
                                        const std::optional<NetworkLayout>& layout) {
  std::vector<SweepPoint> out;
  for (int n : n_antennas) {
    ScenarioConfig cfg = base;
    cfg.n_antennas = n;
    const IsacScenario scenario = layout ? IsacScenario(cfg, with_antenna_count(*layout, n)) : IsacScenario(cfg);
    for (double v : values) {
      if (!(v >= 0.0 && v <= 1.0)) {
        std::clog << "sweep: skipping " << to_string(variable) << " = " << v << " (outside [0, 1])\n";
        continue;
      }
      SweepPoint p;
      p.variable = variable;
      p.value = v;
      p.n_antennas = n;
      p.point = scenario.evaluate_genes(sweep_genes(variable, v, scenario.m_dl(), scenario.k_dl()));
      out.push_back(std::move(p));
    }
  }
  return out;
}

// ------------------------------------------------------ scheme comparison

void validate(const SchemeSpec& s) {
  for (double t : {s.t_sense, s.t_ul, s.t_dl, s.t_joint})
    if (!(t >= 0.0)) throw std::invalid_argument("scheme '" + s.name + "': negative time fraction");
  const double total = s.t_sense + s.t_ul + s.t_dl + s.t_joint;
  if (std::abs(total - 1.0) > kFractionTolerance)
    throw std::invalid_argument("scheme '" + s.name + "': time fractions sum to " + format_double(total) + ", not 1");
  if (s.sensing_symbols < 0) throw std::invalid_argument("scheme '" + s.name + "': negative sensing symbols");
}

std::vector<SchemeRow> compare_schemes(const IsacScenario& scenario, const std::vector<int>& sensing_symbols,
                                       int block_symbols) {
  if (block_symbols < 1) throw std::invalid_argument("block_symbols must be >= 1");
  const int m_dl = scenario.m_dl(), k_dl = scenario.k_dl();

  // Slot-level rates. Data slots give the whole budget to data.
  PowerAllocation dl_only = scenario.allocation(sweep_genes(SweepVariable::kBeta, 0.0, m_dl, k_dl));
  dl_only.p_ul.setZero();
  PowerAllocation ul_only = scenario.allocation(Eigen::VectorXd::Zero(scenario.num_genes()));
  const PowerAllocation joint = scenario.allocation(sweep_genes(SweepVariable::kBeta, 0.0, m_dl, k_dl));
  const PowerAllocation proposed = scenario.allocation(scenario.epa_genes());

  const RateReport r_dl_only = scenario.rates(dl_only);
  const RateReport r_ul_only = scenario.rates(ul_only);
  const RateReport r_joint = scenario.rates(joint);
  const RateReport r_proposed = scenario.rates(proposed);

  // Per-symbol bounds; information adds linearly over identical symbols.
  const SensingReport full_pilot = scenario.sensing(scenario.allocation(sweep_genes(SweepVariable::kBeta, 1.0, m_dl, k_dl)));
  const SensingReport epa_pilot = scenario.sensing(proposed);

  std::vector<SchemeRow> rows;
  for (int s : sensing_symbols) {
    if (s < 1 || s > block_symbols)
      throw std::invalid_argument("sensing symbol count " + std::to_string(s) + " outside [1, block_symbols]");
    const double ts = static_cast<double>(s) / block_symbols;

    SchemeRow tdd;
    tdd.spec = {kTddIsac, ts, (1.0 - ts) / 2.0, (1.0 - ts) / 2.0, 0.0, s};
    tdd.rate_dl = tdd.spec.t_dl * r_dl_only.r_dl.sum();
    tdd.rate_ul = tdd.spec.t_ul * r_ul_only.r_ul.sum();
    tdd.speb = full_pilot.speb / s;
    tdd.soeb = full_pilot.soeb / s;

    SchemeRow nafd;
    nafd.spec = {kTddNafd, ts, 0.0, 0.0, 1.0 - ts, s};
    nafd.rate_dl = nafd.spec.t_joint * r_joint.r_dl.sum();
    nafd.rate_ul = nafd.spec.t_joint * r_joint.r_ul.sum();
    nafd.speb = tdd.speb;
    nafd.soeb = tdd.soeb;

    SchemeRow prop;
    prop.spec = {kProposedScheme, 0.0, 0.0, 0.0, 1.0, s};
    prop.rate_dl = r_proposed.r_dl.sum();
    prop.rate_ul = r_proposed.r_ul.sum();
    prop.speb = epa_pilot.speb / block_symbols;
    prop.soeb = epa_pilot.soeb / block_symbols;

    for (SchemeRow* r : {&tdd, &nafd, &prop}) {
      validate(r->spec);
      r->sum_rate = r->rate_dl + r->rate_ul;
      rows.push_back(*r);
    }
  }
  return rows;
}

// ------------------------------------------------------------------- pareto

Nsga2Problem make_nsga2_problem(const IsacScenario& scenario) {
  Nsga2Problem p;
  p.num_genes = scenario.num_genes();
  const int m_dl = scenario.m_dl(), k_dl = scenario.k_dl();
  p.repair = [m_dl, k_dl](const Eigen::VectorXd& g) { return repair_genes(g, m_dl, k_dl); };
  p.evaluate = [&scenario](const Eigen::VectorXd& g) {
    const PerformancePoint pt = scenario.evaluate_genes(g);
    return Objectives(pt.f1, pt.f2);
  };
  return p;
}

ParetoRun run_pareto(const IsacScenario& scenario, const Nsga2Config& nsga, const DqnConfig* dqn) {
  ParetoRun run;
  run.n_antennas = scenario.layout().n_antennas();
  run.front = evolve_nsga2(make_nsga2_problem(scenario), nsga);
  for (const Individual& ind : run.front.members) run.members.push_back(scenario.evaluate_genes(ind.genes));
  run.epa = scenario.evaluate_genes(scenario.epa_genes());
  if (dqn) run.dqn = scenario.evaluate(train_dqn(scenario, *dqn).best_alloc);
  return run;
}

// ---------------------------------------------------------------- writers

namespace {

const std::vector<std::string> kPointColumns = {"f1", "f2", "speb", "soeb", "sum_rate_dl", "sum_rate_ul",
                                                "rate_std_err", "observable"};

std::vector<std::string> point_cells(const PerformancePoint& p) {
  return {format_double(p.f1),          format_double(p.f2),          format_double(p.speb),
          format_double(p.soeb),        format_double(p.r_dl.sum()),  format_double(p.r_ul.sum()),
          format_double(p.rate_std_err), flag(p.observable)};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

void write_points_csv(const std::filesystem::path& path, const std::vector<std::string>& labels,
                      const std::vector<PerformancePoint>& points) {
  if (labels.size() != points.size()) throw std::invalid_argument("write_points_csv: one label per point");
  CsvWriter w(path);
  w.header(concat({"label"}, kPointColumns));
  for (std::size_t i = 0; i < points.size(); ++i) w.row_strings(concat({labels[i]}, point_cells(points[i])));
}

void write_contour_csv(const std::filesystem::path& path, const ContourResult& r) {
  CsvWriter w(path);
  w.header({"ix", "iy", "x", "y", "masked", "speb", "soeb"});
  for (const ContourCell& c : r.cells)
    w.row_strings({std::to_string(c.ix), std::to_string(c.iy), format_double(c.point.x()), format_double(c.point.y()),
                   flag(c.masked), format_double(c.speb), format_double(c.soeb)});
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points) {
  CsvWriter w(path);
  w.header(concat({"variable", "value", "n_antennas"}, kPointColumns));
  for (const SweepPoint& p : points)
    w.row_strings(concat({to_string(p.variable), format_double(p.value), std::to_string(p.n_antennas)},
                         point_cells(p.point)));
}

void write_schemes_csv(const std::filesystem::path& path, const std::vector<SchemeRow>& rows) {
  CsvWriter w(path);
  w.header({"scheme", "sensing_symbols", "t_sense", "t_ul", "t_dl", "t_joint", "rate_dl", "rate_ul", "sum_rate",
            "speb", "soeb"});
  for (const SchemeRow& r : rows)
    w.row_strings({r.spec.name, std::to_string(r.spec.sensing_symbols), format_double(r.spec.t_sense),
                   format_double(r.spec.t_ul), format_double(r.spec.t_dl), format_double(r.spec.t_joint),
                   format_double(r.rate_dl), format_double(r.rate_ul), format_double(r.sum_rate),
                   format_double(r.speb), format_double(r.soeb)});
}

void write_pareto_csv(const std::filesystem::path& path, const std::vector<ParetoRun>& runs) {
  Eigen::Index genes = 0;
  for (const ParetoRun& run : runs) genes = std::max(genes, run.epa.genes.size());
  std::vector<std::string> header = concat({"kind", "n_antennas", "index"}, kPointColumns);
  for (Eigen::Index g = 0; g < genes; ++g) header.push_back("gene_" + std::to_string(g));

  CsvWriter w(path);
  w.header(header);
  auto emit = [&](const std::string& kind, const std::string& n, std::size_t index, const PerformancePoint& p) {
    std::vector<std::string> cells = concat({kind, n, std::to_string(index)}, point_cells(p));
    for (Eigen::Index g = 0; g < genes; ++g) cells.push_back(g < p.genes.size() ? format_double(p.genes(g)) : "");
    w.row_strings(cells);
  };
  for (const ParetoRun& run : runs) {
    const std::string n = std::to_string(run.n_antennas);
    for (std::size_t i = 0; i < run.members.size(); ++i) emit("front", n, i, run.members[i]);
    emit("epa", n, 0, run.epa);
    if (run.dqn) emit("dqn", n, 0, *run.dqn);
  }
}

void write_sensing_csv(const std::filesystem::path& path, const SensingReport& report) {
  CsvWriter w(path);
  w.header({"n", "sigma2_d", "sigma2_theta", "sigma2_phi", "speb", "soeb", "f2"});
  for (Eigen::Index n = 0; n < report.sigma2_d.size(); ++n)
    w.row_strings({std::to_string(n), format_double(report.sigma2_d(n)), format_double(report.sigma2_theta(n)),
                   format_double(report.sigma2_phi(n)), format_double(report.speb), format_double(report.soeb),
                   format_double(report.f2)});
}

void write_history_csv(const std::filesystem::path& path, const std::vector<ParetoRun>& runs) {
  CsvWriter w(path);
  w.header({"n_antennas", "generation", "hypervolume", "best_f1", "best_f2", "front_size"});
  for (const ParetoRun& run : runs)
    for (const GenerationStats& g : run.front.history)
      w.row_strings({std::to_string(run.n_antennas), std::to_string(g.generation), format_double(g.hypervolume),
                     format_double(g.best_f1), format_double(g.best_f2), std::to_string(g.front_size)});
}

void write_dqn_csv(const std::filesystem::path& trace_path, const std::filesystem::path& steps_path,
                   const DqnResult& r) {
  CsvWriter trace(trace_path);
  trace.header({"episode", "episode_reward", "best_reward"});
  for (std::size_t e = 0; e < r.episode_rewards.size(); ++e)
    trace.row_strings({std::to_string(e), format_double(r.episode_rewards[e]), format_double(r.best_trace[e])});
  CsvWriter steps(steps_path);
  steps.header({"step", "reward"});
  for (std::size_t s = 0; s < r.step_rewards.size(); ++s)
    steps.row_strings({std::to_string(s), format_double(r.step_rewards[s])});
}

}  // namespace nafd
