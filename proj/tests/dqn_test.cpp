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

#include <algorithm>
#include <filesystem>

#include "nafd/dqn.hpp"
#include "nafd/moo.hpp"
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
  c.seed = 3;
  return c;
}

const IsacScenario& small_scenario() {
  static const IsacScenario s(small_config());
  return s;
}

DqnConfig quick_config() {
  DqnConfig c;
  c.episodes = 4;
  c.steps_per_episode = 10;
  c.hidden = {16};
  c.batch_size = 8;
  c.warmup = 8;
  c.buffer_capacity = 50;
  c.target_sync = 5;
  c.anneal_steps = 30;
  c.seed = 9;
  return c;
}

TEST(Reward, ZeroWeightIsExactlyTheRate) {
  const IsacScenario& s = small_scenario();
  const PowerAllocation a = s.allocation(s.epa_genes());
  EXPECT_EQ(reward(s, a, 0.0), s.evaluate(a).f1);
}

TEST(Reward, NoPilotPowerLeavesOnlyTheRate) {
  const IsacScenario& s = small_scenario();
  Eigen::VectorXd genes = s.epa_genes();
  for (int m = 0; m < s.m_dl(); ++m) genes(pilot_gene(m, s.k_dl())) = 0.0;
  const PowerAllocation a = s.allocation(genes);
  EXPECT_EQ(s.evaluate(a).f2, 0.0);
  EXPECT_EQ(reward(s, a, 1e15), s.evaluate(a).f1);
}

TEST(Reward, CalibrationBalancesTheObjectivesAtEpa) {
  const IsacScenario& s = small_scenario();
  const double b = calibrate_scalarization(s);
  const PerformancePoint p = s.evaluate_genes(s.epa_genes());
  EXPECT_LT(relative_error(p.f1, b * p.f2), 1e-9);
  EXPECT_LT(relative_error(reward(s, p.alloc, b), 2.0 * p.f1), 1e-9);
}

TEST(Reward, RejectsInfeasibleAllocation) {
  const IsacScenario& s = small_scenario();
  PowerAllocation a = s.allocation(s.epa_genes());
  a.alpha *= 3.0;
  EXPECT_THROW(reward(s, a, 1.0), std::invalid_argument);
}

TEST(Schedule, LinearThenFlat) {
  DqnConfig c;
  EXPECT_DOUBLE_EQ(epsilon_schedule(0, c), 0.1);
  EXPECT_DOUBLE_EQ(epsilon_schedule(750, c), 0.525);
  EXPECT_DOUBLE_EQ(epsilon_schedule(1500, c), 0.95);
  EXPECT_DOUBLE_EQ(epsilon_schedule(100000, c), 0.95);
  EXPECT_THROW(epsilon_schedule(-1, c), std::invalid_argument);
}

TEST(Actions, EncodingRoundTrips) {
  const int k = 3, levels = 10, m = 4;
  for (int a = 0; a < action_count(m, k, levels); ++a) {
    const ActionSpec spec = decode_action(a, k, levels);
    EXPECT_EQ(a, (spec.rru * (k + 1) + spec.stream) * levels + spec.level);
    EXPECT_LT(spec.stream, k + 1);
    EXPECT_LT(spec.rru, m);
    EXPECT_EQ(encode_action(spec, k, levels), a);
  }
  EXPECT_THROW(decode_action(-1, k, levels), std::out_of_range);
}

TEST(Actions, LevelGrid) {
  const Eigen::VectorXd g = level_grid(10, 3);
  ASSERT_EQ(g.size(), 10);
  EXPECT_EQ(g(0), 0.0);
  EXPECT_EQ(g(9), 1.0);
  EXPECT_NEAR(g(3), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(level_grid(1, 3), Eigen::VectorXd::Constant(1, 0.25));
}

TEST(Environment, SingleLevelActionsKeepEpa) {
  const IsacScenario& s = small_scenario();
  const DqnEnvironment env(s, 1.0, 1);
  const Eigen::VectorXd start = env.initial_genes();
  const double r0 = env.reward(start);
  for (int a = 0; a < env.actions(); ++a) {
    const Eigen::VectorXd next = env.apply(start, a);
    EXPECT_LT((next - start).norm(), 1e-15);
    EXPECT_EQ(env.reward(next), r0);
  }
}

TEST(Environment, ActionsStayFeasible) {
  const IsacScenario& s = small_scenario();
  const DqnEnvironment env(s, 1.0, 10);
  EXPECT_EQ(env.state_size(), s.num_genes() + s.m_dl() * s.k_dl());
  Eigen::VectorXd genes = env.initial_genes();
  for (int a = env.actions() - 1; a >= 0; a -= 7) {
    genes = env.apply(genes, a);
    EXPECT_TRUE(satisfies_power_constraint(s.allocation(genes), s.reference_beams(), 1e-12));
    EXPECT_LE(genes.maxCoeff(), 1.0);
    EXPECT_GE(genes.minCoeff(), 0.0);
  }
  EXPECT_THROW(env.apply(genes, env.actions()), std::out_of_range);
}

TEST(Mlp, BatchMatchesSingleForward) {
  Rng rng(4);
  const Mlp net({5, 7, 3}, rng);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 4);
  const Eigen::MatrixXd y = net.forward_batch(x);
  for (int j = 0; j < 4; ++j) EXPECT_LT((y.col(j) - net.forward(x.col(j))).norm(), 1e-14);
}

TEST(Mlp, SmallStepLowersTdLoss) {
  Rng rng(5);
  Mlp net({4, 8, 8, 3}, rng);
  const Eigen::MatrixXd states = Eigen::MatrixXd::Random(4, 6);
  const std::vector<int> actions = {0, 1, 2, 0, 1, 2};
  const Eigen::VectorXd targets = Eigen::VectorXd::LinSpaced(6, -1.0, 2.0);
  const double before = net.td_loss(states, actions, targets);
  EXPECT_DOUBLE_EQ(net.train_step(states, actions, targets, 1e-3), before);
  EXPECT_LT(net.td_loss(states, actions, targets), before);
}

TEST(Mlp, TdLossByHand) {
  Rng rng(6);
  const Mlp net({2, 3, 2}, rng);
  Eigen::MatrixXd s(2, 2);
  s << 0.3, -1.0, 0.7, 0.2;
  const Eigen::VectorXd t = Eigen::Vector2d(0.5, -0.25);
  const double q0 = net.forward(s.col(0))(1), q1 = net.forward(s.col(1))(0);
  const double want = 0.5 * (0.5 * (q0 - 0.5) * (q0 - 0.5) + 0.5 * (q1 + 0.25) * (q1 + 0.25));
  EXPECT_NEAR(net.td_loss(s, {1, 0}, t), want, 1e-15);
}

TEST(Mlp, CheckpointRoundTrip) {
  Rng rng(7);
  Mlp net({6, 5, 4}, rng);
  net.train_step(Eigen::MatrixXd::Random(6, 3), {0, 1, 3}, Eigen::Vector3d(1, 2, 3), 1e-2);
  const auto path = std::filesystem::temp_directory_path() / "nafd_qnet_roundtrip.txt";
  net.save(path);
  const Mlp back = Mlp::load(path);
  EXPECT_TRUE(back == net);
  const Eigen::VectorXd x = Eigen::VectorXd::Random(6);
  EXPECT_EQ(back.forward(x), net.forward(x));
  std::filesystem::remove(path);
  EXPECT_THROW(Mlp::load(path), std::runtime_error);
}

TEST(Replay, FifoEvictionAndSampling) {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) buf.push({Eigen::VectorXd::Constant(1, i), i, double(i), Eigen::VectorXd::Zero(1)});
  EXPECT_EQ(buf.size(), 3);
  EXPECT_EQ(buf.oldest().reward, 2.0);
  Rng rng(1);
  const auto batch = buf.sample(20, rng);
  ASSERT_EQ(batch.size(), 20u);
  for (const Experience* e : batch) {
    EXPECT_GE(e->reward, 2.0);
    EXPECT_LE(e->reward, 4.0);
  }
  EXPECT_THROW(ReplayBuffer(0), std::invalid_argument);
}

TEST(Training, DeterministicForFixedSeed) {
  const IsacScenario& s = small_scenario();
  const DqnResult a = train_dqn(s, quick_config());
  const DqnResult b = train_dqn(s, quick_config());
  EXPECT_EQ(a.step_rewards, b.step_rewards);
  EXPECT_EQ(a.best_genes, b.best_genes);
  EXPECT_TRUE(a.network == b.network);
  DqnConfig other = quick_config();
  other.seed = 10;
  EXPECT_NE(train_dqn(s, other).step_rewards, a.step_rewards);
}

TEST(Training, ObserverSeesOnlyFeasibleAllocations) {
  const IsacScenario& s = small_scenario();
  int seen = 0;
  const DqnResult r = train_dqn(s, quick_config(), [&](const PowerAllocation& a) {
    ++seen;
    EXPECT_TRUE(satisfies_power_constraint(a, s.reference_beams(), 1e-12));
  });
  EXPECT_EQ(seen, 1 + 4 * 10);
  EXPECT_EQ(r.step_rewards.size(), 40u);
}

TEST(Training, BestTraceIsMonotoneAndConsistent) {
  const IsacScenario& s = small_scenario();
  const DqnResult r = train_dqn(s, quick_config());
  ASSERT_EQ(r.best_trace.size(), 4u);
  EXPECT_TRUE(std::is_sorted(r.best_trace.begin(), r.best_trace.end()));
  EXPECT_EQ(r.best_reward, *std::max_element(r.step_rewards.begin(), r.step_rewards.end()));
  EXPECT_LT(relative_error(reward(s, r.best_alloc, r.scalarization), r.best_reward), 1e-12);
  EXPECT_FALSE(r.losses.empty());
  EXPECT_TRUE(r.network.finite());

  const DqnEnvironment env(s, r.scalarization, quick_config().levels);
  const Eigen::VectorXd greedy = greedy_genes(env, r.network, 10);
  EXPECT_TRUE(satisfies_power_constraint(s.allocation(greedy), s.reference_beams(), 1e-12));
}

TEST(Training, DivergenceGuardReportsTrace) {
  DqnConfig c = quick_config();
  c.q_bound = 1e-12;
  try {
    train_dqn(small_scenario(), c);
    FAIL() << "expected DqnDivergence";
  } catch (const DqnDivergence& e) {
    EXPECT_EQ(e.trace().size(), static_cast<std::size_t>(c.warmup));
  }
}

TEST(Training, RejectsBadConfiguration) {
  DqnConfig c = quick_config();
  c.batch_size = 0;
  try {
    validate(c);
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_EQ(std::string(e.what()).rfind("dqn.", 0), 0u);
  }
}

}  // namespace
}  // namespace nafd
