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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "nafd/experiments.hpp"
#include "test_support.hpp"

namespace nafd {
namespace {

using testing::relative_error;

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.m_total = 8;
  c.n_antennas = 4;
  c.k_ul = 2;
  c.k_dl = 2;
  c.circle_radius = 150.0;
  c.region_radius = 250.0;
  c.trials = 20;
  c.seed = 5;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

int line_count(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("nafd_exp_" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

TEST(Epa, ConstraintIsTight) {
  for (int k : {1, 3}) {
    const NetworkLayout lay = make_circle_deployment(8, 150.0, 2, k, 250.0, 7, 4);
    const ChannelSet ch = draw_realization(lay, FadingParams{}, 3);
    const BeamSet beams = compute_beams(lay, ch);
    const PowerAllocation a = epa_allocation(beams, k, 1.0, Eigen::VectorXd::Constant(2, 0.2));
    const Eigen::VectorXd load = constraint_load(a, beams);
    for (int m = 0; m < lay.m_dl(); ++m) EXPECT_NEAR(load(m), 1.0, 1e-12);
    for (int m = 0; m < lay.m_dl(); ++m)
      EXPECT_NEAR(a.beta(m) * beams.sensing_norm2(m), 1.0 / (k + 1), 1e-12);
  }
}

TEST(SweepGenes, PilotAndDataShares) {
  const Eigen::VectorXd b = sweep_genes(SweepVariable::kBeta, 0.4, 2, 3);
  EXPECT_DOUBLE_EQ(b(3), 0.4);
  EXPECT_DOUBLE_EQ(b(0), 0.2);
  const Eigen::VectorXd a = sweep_genes(SweepVariable::kAlpha, 0.4, 2, 3);
  EXPECT_DOUBLE_EQ(a(7), 0.6);
  EXPECT_NEAR(a.segment(4, 3).sum(), 0.4, 1e-15);
  EXPECT_THROW(sweep_genes(SweepVariable::kBeta, 1.5, 2, 3), std::invalid_argument);
  EXPECT_EQ(to_string(SweepVariable::kAlpha), "alpha");
}

TEST(Contour, ShapeOrderingAndMasking) {
  const NetworkLayout lay = make_circle_deployment(16, 200.0, 3, 3, 300.0, 1, 8);
  GridSpec grid;
  grid.nx = 13;
  grid.ny = 7;
  const ContourResult r = run_contour(lay, grid, ContourSettings{}, 2);
  ASSERT_EQ(r.cells.size(), 13u * 7u);
  EXPECT_EQ(r.cells[1].ix, 1);
  EXPECT_EQ(r.cells[1].iy, 0);
  EXPECT_EQ(r.cells[13].iy, 1);
  EXPECT_DOUBLE_EQ(r.cells.front().point.x(), -300.0);
  EXPECT_DOUBLE_EQ(r.cells.back().point.y(), 300.0);
  // DL-RRUs at (+-200, 0) and (0, +-200) fall on the grid (x step 50, y step 100).
  auto near_rru = [&](const Position& p) {
    for (const auto* set : {&lay.dl_rrus, &lay.ul_rrus})
      for (const Rru& rru : *set)
        if ((rru.center - p).norm() < 1.0) return true;
    return false;
  };
  int masked = 0;
  for (const ContourCell& c : r.cells) {
    EXPECT_EQ(c.masked, near_rru(c.point));
    if (c.masked) {
      ++masked;
      EXPECT_TRUE(std::isnan(c.speb));
    } else {
      EXPECT_TRUE(std::isfinite(c.speb));
      EXPECT_GT(c.speb, c.soeb);
    }
  }
  EXPECT_EQ(masked, 4);
}

TEST(Contour, RotatingByOneRruPairPeriodPreservesMetrics) {
  // Sixteen RRUs alternate DL/UL, so a rotation by 2 * 2pi/16 maps the
  // deployment onto itself.
  const NetworkLayout lay = make_circle_deployment(16, 200.0, 3, 3, 300.0, 1, 8);
  const ContourSettings settings;
  const Position p(120.0, 35.0);
  const Eigen::Rotation2Dd rot(kPi / 4);
  const SensingReport a = sensing_at_target(lay, p, settings);
  const SensingReport b = sensing_at_target(lay, rot * p, settings);
  EXPECT_LT(relative_error(a.speb, b.speb), 1e-9);
  EXPECT_LT(relative_error(a.soeb, b.soeb), 1e-9);
}

TEST(Sweep, MonotoneInPilotShareAndAntennas) {
  const std::vector<double> values = {0.2, 0.5, 0.8};
  const std::vector<int> ns = {2, 4};
  const auto pts = run_power_sweep(small_config(), SweepVariable::kBeta, values, ns);
  ASSERT_EQ(pts.size(), 6u);
  for (std::size_t s = 0; s < 2; ++s) {
    EXPECT_EQ(pts[s * 3].n_antennas, ns[s]);
    for (std::size_t i = 1; i < 3; ++i) {
      EXPECT_LT(pts[s * 3 + i].point.speb, pts[s * 3 + i - 1].point.speb);
      EXPECT_LT(pts[s * 3 + i].point.f1, pts[s * 3 + i - 1].point.f1);
    }
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(pts[3 + i].point.speb, pts[i].point.speb);
}

TEST(Schemes, AccountingAndOrdering) {
  const IsacScenario s(small_config());
  const auto rows = compare_schemes(s, {5, 25, 50}, 100);
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t i = 0; i < rows.size(); i += 3) {
    const SchemeRow &tdd = rows[i], &nafd = rows[i + 1], &prop = rows[i + 2];
    EXPECT_EQ(tdd.spec.name, kTddIsac);
    EXPECT_EQ(nafd.spec.name, kTddNafd);
    EXPECT_EQ(prop.spec.name, kProposedScheme);
    for (const SchemeRow* r : {&tdd, &nafd, &prop}) {
      const SchemeSpec& sp = r->spec;
      EXPECT_NEAR(sp.t_sense + sp.t_ul + sp.t_dl + sp.t_joint, 1.0, 1e-12);
      EXPECT_DOUBLE_EQ(r->sum_rate, r->rate_dl + r->rate_ul);
    }
    EXPECT_DOUBLE_EQ(tdd.spec.t_sense, tdd.spec.sensing_symbols / 100.0);
    EXPECT_GT(nafd.sum_rate, tdd.sum_rate);
    EXPECT_GT(prop.sum_rate, tdd.sum_rate);
    EXPECT_EQ(nafd.speb, tdd.speb);
  }
  // Dedicated-slot bounds fall as 1/s; the proposed scheme does not depend on s.
  EXPECT_LT(relative_error(rows[0].speb / rows[3].speb, 5.0), 1e-12);
  EXPECT_EQ(rows[2].speb, rows[8].speb);
  EXPECT_THROW(compare_schemes(s, {0}, 100), std::invalid_argument);
  EXPECT_THROW(compare_schemes(s, {101}, 100), std::invalid_argument);
  EXPECT_THROW(validate(SchemeSpec{"x", 0.5, 0.5, 0.5, 0.0, 1}), std::invalid_argument);
}

TEST(Pareto, MembersAreReevaluatedConsistently) {
  const IsacScenario s(small_config());
  Nsga2Config cfg;
  cfg.population = 8;
  cfg.generations = 3;
  const ParetoRun run = run_pareto(s, cfg);
  ASSERT_EQ(run.members.size(), run.front.members.size());
  for (std::size_t i = 0; i < run.members.size(); ++i) {
    EXPECT_EQ(run.members[i].f1, run.front.members[i].objectives(0));
    EXPECT_EQ(run.members[i].f2, run.front.members[i].objectives(1));
    EXPECT_TRUE(satisfies_power_constraint(run.members[i].alloc, s.reference_beams(), 1e-12));
  }
  EXPECT_EQ(run.epa.f1, s.evaluate_genes(s.epa_genes()).f1);
  EXPECT_FALSE(run.dqn.has_value());
  EXPECT_EQ(run.n_antennas, 4);
}

TEST(Csv, HeadersRowsAndByteStability) {
  TempDir dir;
  const IsacScenario s(small_config());
  const PerformancePoint epa = s.evaluate_genes(s.epa_genes());
  write_points_csv(dir / "a.csv", {"epa"}, {epa});
  write_points_csv(dir / "b.csv", {"epa"}, {s.evaluate_genes(s.epa_genes())});
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  EXPECT_EQ(first_line(dir / "a.csv"), "label,f1,f2,speb,soeb,sum_rate_dl,sum_rate_ul,rate_std_err,observable");
  EXPECT_EQ(line_count(dir / "a.csv"), 2);
  EXPECT_THROW(write_points_csv(dir / "c.csv", {}, {epa}), std::invalid_argument);

  write_sensing_csv(dir / "sensing.csv", s.sensing(epa.alloc));
  EXPECT_EQ(first_line(dir / "sensing.csv"), "n,sigma2_d,sigma2_theta,sigma2_phi,speb,soeb,f2");
  EXPECT_EQ(line_count(dir / "sensing.csv"), 1 + s.layout().m_ul());

  write_schemes_csv(dir / "schemes.csv", compare_schemes(s, {10, 20}, 100));
  EXPECT_EQ(first_line(dir / "schemes.csv"),
            "scheme,sensing_symbols,t_sense,t_ul,t_dl,t_joint,rate_dl,rate_ul,sum_rate,speb,soeb");
  EXPECT_EQ(line_count(dir / "schemes.csv"), 7);

  ParetoRun run;
  run.n_antennas = 4;
  run.epa = epa;
  write_pareto_csv(dir / "pareto.csv", {run});
  const std::string header = first_line(dir / "pareto.csv");
  EXPECT_EQ(header.rfind("kind,n_antennas,index,f1,", 0), 0u);
  EXPECT_NE(header.find(",gene_11"), std::string::npos);
  EXPECT_EQ(header.find("gene_12"), std::string::npos);

  const auto sweep = run_power_sweep(small_config(), SweepVariable::kAlpha, {0.5}, {4});
  write_sweep_csv(dir / "sweep.csv", sweep);
  EXPECT_EQ(first_line(dir / "sweep.csv").rfind("variable,value,n_antennas,f1,", 0), 0u);

  GridSpec grid;
  grid.nx = grid.ny = 3;
  write_contour_csv(dir / "contour.csv", run_contour(s.layout(), grid, ContourSettings{}));
  EXPECT_EQ(first_line(dir / "contour.csv"), "ix,iy,x,y,masked,speb,soeb");
  EXPECT_EQ(line_count(dir / "contour.csv"), 10);
  EXPECT_THROW(write_contour_csv(dir / "missing" / "x.csv", ContourResult{}), std::runtime_error);
}

}  // namespace
}  // namespace nafd
