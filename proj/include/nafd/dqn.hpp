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
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nafd/rng.hpp"
#include "nafd/scenario.hpp"

namespace nafd {

struct DqnConfig {
  int episodes = 40;
  int steps_per_episode = 50;
  int levels = 10;  ///< L; levels are linspace(0, 1, L), or the EPA share when L == 1
  std::vector<int> hidden = {128, 128};
  double learning_rate = 1e-3;
  double discount = 0.9;
  int buffer_capacity = 10000;
  int batch_size = 64;
  int target_sync = 200;   ///< gradient updates between target-network copies
  int warmup = 64;         ///< experiences collected before the first update
  double epsilon_start = 0.1;
  double epsilon_end = 0.95;
  int anneal_steps = 1500;
  double q_bound = 1e6;    ///< divergence guard on |Q|
  double scalarization = -1.0;  ///< b; <= 0 calibrates b = f1(EPA) / f2(EPA)
  std::uint64_t seed = 1;
};

void validate(const DqnConfig& config);

/// Exploitation probability at `step`: the agent takes argmax Q when a
/// uniform draw falls below it. Linear from epsilon_start to epsilon_end.
double epsilon_schedule(long step, const DqnConfig& config);

struct ActionSpec {
  int rru = 0;
  int stream = 0;  ///< 0..K_dl-1 data stream, K_dl the pilot
  int level = 0;
};

inline int action_count(int m_dl, int k_dl, int levels) { return m_dl * (k_dl + 1) * levels; }
ActionSpec decode_action(int action, int k_dl, int levels);
int encode_action(const ActionSpec& spec, int k_dl, int levels);
/// Gene value each level index stands for.
Eigen::VectorXd level_grid(int levels, int k_dl);

/// Fully connected ReLU network with a linear output layer, trained with Adam.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> layer_sizes, Rng& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int inputs() const { return sizes_.front(); }
  int outputs() const { return sizes_.back(); }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  /// One column per sample.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const;

  /// Mean over the batch of 0.5 (Q(s, a) - target)^2.
  double td_loss(const Eigen::MatrixXd& states, const std::vector<int>& actions, const Eigen::VectorXd& targets) const;
  /// One Adam step on td_loss; returns the loss before the step.
  double train_step(const Eigen::MatrixXd& states, const std::vector<int>& actions, const Eigen::VectorXd& targets,
                    double learning_rate);

  bool finite() const;
  double max_abs_parameter() const;

  /// Flat text: "nafd-qnet 1", the layer count and sizes, then every weight
  /// (column-major per layer) followed by that layer's bias, one per line.
  void save(const std::filesystem::path& path) const;
  static Mlp load(const std::filesystem::path& path);

  friend bool operator==(const Mlp& a, const Mlp& b);

 private:
  struct Adam {
    std::vector<Eigen::MatrixXd> mw, vw;
    std::vector<Eigen::VectorXd> mb, vb;
    long t = 0;
  };
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  Adam adam_;
};

struct Experience {
  Eigen::VectorXd state;
  int action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_state;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);
  void push(Experience e);
  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }
  /// Uniform with replacement.
  std::vector<const Experience*> sample(int count, Rng& rng) const;
  /// Oldest surviving experience.
  const Experience& oldest() const;

 private:
  int capacity_;
  std::vector<Experience> items_;
  int next_ = 0;
};

/// r = f1 + b f2. Throws std::invalid_argument if `alloc` violates the power
/// constraint.
double reward(const IsacScenario& scenario, const PowerAllocation& alloc, double b);
/// b that makes f1 and b f2 equal at EPA.
double calibrate_scalarization(const IsacScenario& scenario);

/// Stateless view of the allocation problem seen by the agent.
class DqnEnvironment {
 public:
  DqnEnvironment(const IsacScenario& scenario, double b, int levels);

  const IsacScenario& scenario() const { return *scenario_; }
  double scalarization() const { return b_; }
  int levels() const { return levels_; }
  int actions() const { return action_count(scenario_->m_dl(), scenario_->k_dl(), levels_); }
  int state_size() const;

  Eigen::VectorXd initial_genes() const { return scenario_->epa_genes(); }
  /// Sets the chosen gene to its level and repairs.
  Eigen::VectorXd apply(const Eigen::VectorXd& genes, int action) const;
  Eigen::VectorXd state(const Eigen::VectorXd& genes) const;
  double reward(const Eigen::VectorXd& genes) const;

 private:
  const IsacScenario* scenario_;
  double b_;
  int levels_;
  Eigen::VectorXd grid_;
  Eigen::VectorXd csi_summary_;
};

struct DqnResult {
  Eigen::VectorXd best_genes;
  PowerAllocation best_alloc;
  double best_reward = 0.0;
  double epa_reward = 0.0;
  double scalarization = 0.0;
  std::vector<double> step_rewards;     ///< reward after every action, in order
  std::vector<double> episode_rewards;  ///< last reward of each episode
  std::vector<double> best_trace;       ///< best-so-far after each episode
  std::vector<double> losses;
  Mlp network;
};

class DqnDivergence : public std::runtime_error {
 public:
  DqnDivergence(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Called with every allocation the environment evaluates.
using AllocationObserver = std::function<void(const PowerAllocation&)>;

DqnResult train_dqn(const IsacScenario& scenario, const DqnConfig& config, const AllocationObserver& observer = {});

/// Follows argmax Q from EPA for `steps` actions and returns the best state.
Eigen::VectorXd greedy_genes(const DqnEnvironment& env, const Mlp& network, int steps);

}  // namespace nafd
