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

#include "nafd/dqn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "nafd/csv.hpp"
#include "nafd/moo.hpp"

namespace nafd {
namespace {

constexpr char kCheckpointMagic[] = "nafd-qnet";
constexpr int kCheckpointVersion = 1;

enum SeedKey : std::uint64_t { kInitSeed = 1, kActSeed = 2, kReplaySeed = 3 };

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int uniform_index(Rng& rng, int n) {
  // Modulo bias is below 2^-50 for the sizes used here.
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

int argmax(const Eigen::VectorXd& q) {
  Eigen::Index best = 0;
  q.maxCoeff(&best);
  return static_cast<int>(best);
}

}  // namespace

void validate(const DqnConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(c.episodes >= 1, "dqn.episodes must be >= 1");
  require(c.steps_per_episode >= 1, "dqn.steps_per_episode must be >= 1");
  require(c.levels >= 1, "dqn.levels must be >= 1");
  for (int h : c.hidden) require(h >= 1, "dqn.hidden sizes must be >= 1");
  require(c.learning_rate > 0.0, "dqn.learning_rate must be positive");
  require(c.discount >= 0.0 && c.discount < 1.0, "dqn.discount must lie in [0, 1)");
  require(c.buffer_capacity >= 1, "dqn.buffer_capacity must be >= 1");
  require(c.batch_size >= 1, "dqn.batch_size must be >= 1");
  require(c.target_sync >= 1, "dqn.target_sync must be >= 1");
  require(c.warmup >= 0, "dqn.warmup must be >= 0");
  require(c.epsilon_start >= 0.0 && c.epsilon_start <= 1.0, "dqn.epsilon_start must lie in [0, 1]");
  require(c.epsilon_end >= c.epsilon_start && c.epsilon_end <= 1.0,
          "dqn.epsilon_end must lie in [epsilon_start, 1]");
  require(c.anneal_steps >= 0, "dqn.anneal_steps must be >= 0");
  require(c.q_bound > 0.0, "dqn.q_bound must be positive");
}

double epsilon_schedule(long step, const DqnConfig& c) {
  if (step < 0) throw std::invalid_argument("epsilon_schedule: negative step");
  if (c.anneal_steps <= 0 || step >= c.anneal_steps) return c.epsilon_end;
  const double t = static_cast<double>(step) / c.anneal_steps;
  return c.epsilon_start + t * (c.epsilon_end - c.epsilon_start);
}

ActionSpec decode_action(int action, int k_dl, int levels) {
  if (action < 0 || levels < 1 || k_dl < 1) throw std::out_of_range("decode_action: bad arguments");
  ActionSpec s;
  s.level = action % levels;
  const int gene = action / levels;
  s.stream = gene % (k_dl + 1);
  s.rru = gene / (k_dl + 1);
  return s;
}

int encode_action(const ActionSpec& s, int k_dl, int levels) {
  return (s.rru * (k_dl + 1) + s.stream) * levels + s.level;
}

Eigen::VectorXd level_grid(int levels, int k_dl) {
  if (levels < 1) throw std::invalid_argument("level_grid: levels must be >= 1");
  if (levels == 1) return Eigen::VectorXd::Constant(1, 1.0 / (k_dl + 1));
  return Eigen::VectorXd::LinSpaced(levels, 0.0, 1.0);
}

// ---------------------------------------------------------------- Mlp

Mlp::Mlp(std::vector<int> layer_sizes, Rng& rng) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  for (int s : sizes_)
    if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = limit * (2.0 * uniform01(rng) - 1.0);
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(out));
    adam_.mw.push_back(Eigen::MatrixXd::Zero(out, in));
    adam_.vw.push_back(Eigen::MatrixXd::Zero(out, in));
    adam_.mb.push_back(Eigen::VectorXd::Zero(out));
    adam_.vb.push_back(Eigen::VectorXd::Zero(out));
  }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const { return forward_batch(x); }

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& x) const {
  if (x.rows() != inputs()) throw std::invalid_argument("Mlp::forward: input size mismatch");
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = (weights_[l] * a).colwise() + biases_[l];
    a = (l + 1 < weights_.size()) ? relu(z) : std::move(z);
  }
  return a;
}

double Mlp::td_loss(const Eigen::MatrixXd& states, const std::vector<int>& actions,
                    const Eigen::VectorXd& targets) const {
  const Eigen::MatrixXd q = forward_batch(states);
  double loss = 0.0;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const double e = q(actions[j], j) - targets(j);
    loss += 0.5 * e * e;
  }
  return loss / static_cast<double>(q.cols());
}

double Mlp::train_step(const Eigen::MatrixXd& states, const std::vector<int>& actions,
                       const Eigen::VectorXd& targets, double learning_rate) {
  const Eigen::Index batch = states.cols();
  if (static_cast<Eigen::Index>(actions.size()) != batch || targets.size() != batch)
    throw std::invalid_argument("Mlp::train_step: batch size mismatch");
  const std::size_t layers = weights_.size();

  std::vector<Eigen::MatrixXd> act{states};  // inputs of each layer
  std::vector<Eigen::MatrixXd> pre;
  for (std::size_t l = 0; l < layers; ++l) {
    pre.push_back((weights_[l] * act.back()).colwise() + biases_[l]);
    if (l + 1 < layers) act.push_back(relu(pre.back()));
  }
  const Eigen::MatrixXd& q = pre.back();

  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(q.rows(), batch);
  double loss = 0.0;
  for (Eigen::Index j = 0; j < batch; ++j) {
    const double e = q(actions[j], j) - targets(j);
    loss += 0.5 * e * e;
    grad(actions[j], j) = e / static_cast<double>(batch);
  }
  loss /= static_cast<double>(batch);

  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++adam_.t;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam_.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam_.t));
  for (std::size_t l = layers; l-- > 0;) {
    const Eigen::MatrixXd gw = grad * act[l].transpose();
    const Eigen::VectorXd gb = grad.rowwise().sum();
    if (l > 0) grad = ((weights_[l].transpose() * grad).array() * (pre[l - 1].array() > 0.0).cast<double>()).matrix();

    adam_.mw[l] = b1 * adam_.mw[l] + (1.0 - b1) * gw;
    adam_.vw[l] = b2 * adam_.vw[l] + (1.0 - b2) * gw.cwiseAbs2();
    adam_.mb[l] = b1 * adam_.mb[l] + (1.0 - b1) * gb;
    adam_.vb[l] = b2 * adam_.vb[l] + (1.0 - b2) * gb.cwiseAbs2();
    weights_[l].array() -=
        learning_rate * (adam_.mw[l].array() / c1) / ((adam_.vw[l].array() / c2).sqrt() + eps);
    biases_[l].array() -= learning_rate * (adam_.mb[l].array() / c1) / ((adam_.vb[l].array() / c2).sqrt() + eps);
  }
  return loss;
}

bool Mlp::finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l)
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  return true;
}

double Mlp::max_abs_parameter() const {
  double m = 0.0;
  for (std::size_t l = 0; l < weights_.size(); ++l)
    m = std::max({m, weights_[l].cwiseAbs().maxCoeff(), biases_[l].cwiseAbs().maxCoeff()});
  return m;
}

void Mlp::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n' << sizes_.size();
  for (int s : sizes_) out << ' ' << s;
  out << '\n';
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index k = 0; k < weights_[l].size(); ++k) out << format_double(weights_[l].data()[k]) << '\n';
    for (Eigen::Index k = 0; k < biases_[l].size(); ++k) out << format_double(biases_[l](k)) << '\n';
  }
  if (!out) throw std::runtime_error("write failed on '" + path.string() + "'");
}

Mlp Mlp::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path.string() + "'");
  std::string magic;
  int version = 0;
  std::size_t count = 0;
  in >> magic >> version >> count;
  if (!in || magic != kCheckpointMagic || version != kCheckpointVersion)
    throw std::runtime_error("'" + path.string() + "' is not a version-1 Q-network checkpoint");
  std::vector<int> sizes(count);
  for (int& s : sizes) in >> s;
  if (!in) throw std::runtime_error("truncated checkpoint header in '" + path.string() + "'");

  Rng unused(0);
  Mlp net(sizes, unused);
  auto read = [&](double& v) {
    std::string token;
    if (!(in >> token)) throw std::runtime_error("truncated checkpoint '" + path.string() + "'");
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || end != token.data() + token.size())
      throw std::runtime_error("bad number '" + token + "' in checkpoint");
  };
  for (std::size_t l = 0; l < net.weights_.size(); ++l) {
    for (Eigen::Index k = 0; k < net.weights_[l].size(); ++k) read(net.weights_[l].data()[k]);
    for (Eigen::Index k = 0; k < net.biases_[l].size(); ++k) read(net.biases_[l](k));
  }
  std::string extra;
  if (in >> extra) throw std::runtime_error("trailing data in checkpoint '" + path.string() + "'");
  return net;
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.sizes_ != b.sizes_) return false;
  for (std::size_t l = 0; l < a.weights_.size(); ++l)
    if (a.weights_[l] != b.weights_[l] || a.biases_[l] != b.biases_[l]) return false;
  return true;
}

// ---------------------------------------------------------- replay buffer

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
  items_.reserve(static_cast<std::size_t>(capacity));
}

void ReplayBuffer::push(Experience e) {
  if (size() < capacity_) {
    items_.push_back(std::move(e));
  } else {
    items_[static_cast<std::size_t>(next_)] = std::move(e);
    next_ = (next_ + 1) % capacity_;
  }
}

std::vector<const Experience*> ReplayBuffer::sample(int count, Rng& rng) const {
  if (items_.empty()) throw std::logic_error("ReplayBuffer::sample on an empty buffer");
  std::vector<const Experience*> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(&items_[static_cast<std::size_t>(uniform_index(rng, size()))]);
  return out;
}

const Experience& ReplayBuffer::oldest() const {
  if (items_.empty()) throw std::logic_error("ReplayBuffer::oldest on an empty buffer");
  return items_[static_cast<std::size_t>(size() < capacity_ ? 0 : next_)];
}

// ---------------------------------------------------------- environment

double reward(const IsacScenario& scenario, const PowerAllocation& alloc, double b) {
  if (!satisfies_power_constraint(alloc, scenario.reference_beams()))
    throw std::invalid_argument("reward: allocation violates the per-RRU power budget; repair it first");
  const PerformancePoint p = scenario.evaluate(alloc);
  return b == 0.0 ? p.f1 : p.f1 + b * p.f2;
}

double calibrate_scalarization(const IsacScenario& scenario) {
  const PerformancePoint p = scenario.evaluate_genes(scenario.epa_genes());
  if (!(p.f2 > 0.0)) throw std::domain_error("calibrate_scalarization: EPA point has no sensing information");
  return p.f1 / p.f2;
}

DqnEnvironment::DqnEnvironment(const IsacScenario& scenario, double b, int levels)
    : scenario_(&scenario), b_(b), levels_(levels), grid_(level_grid(levels, scenario.k_dl())) {
  const NetworkLayout& lay = scenario.layout();
  const double alpha = scenario.config().fading.alpha_dl;
  Eigen::VectorXd g(lay.m_dl() * lay.k_dl());
  for (int m = 0; m < lay.m_dl(); ++m)
    for (int k = 0; k < lay.k_dl(); ++k)
      g(m * lay.k_dl() + k) = std::log10(large_scale_gain((lay.dl_rrus[m].center - lay.dl_users[k]).norm(), alpha,
                                                          scenario.config().fading.reference_distance));
  g.array() -= g.mean();
  const double sd = std::sqrt(g.squaredNorm() / static_cast<double>(g.size()));
  if (sd > 0.0) g /= sd;
  csi_summary_ = g;
}

int DqnEnvironment::state_size() const { return scenario_->num_genes() + static_cast<int>(csi_summary_.size()); }

Eigen::VectorXd DqnEnvironment::apply(const Eigen::VectorXd& genes, int action) const {
  if (action < 0 || action >= actions()) throw std::out_of_range("DqnEnvironment::apply: action out of range");
  const int k = scenario_->k_dl();
  const ActionSpec a = decode_action(action, k, levels_);
  Eigen::VectorXd next = genes;
  next(a.rru * (k + 1) + a.stream) = grid_(a.level);
  return repair_genes(next, scenario_->m_dl(), k);
}

Eigen::VectorXd DqnEnvironment::state(const Eigen::VectorXd& genes) const {
  Eigen::VectorXd s(state_size());
  s << genes, csi_summary_;
  return s;
}

double DqnEnvironment::reward(const Eigen::VectorXd& genes) const {
  return nafd::reward(*scenario_, scenario_->allocation(genes), b_);
}

// ------------------------------------------------------------- training

Eigen::VectorXd greedy_genes(const DqnEnvironment& env, const Mlp& network, int steps) {
  Eigen::VectorXd genes = env.initial_genes();
  Eigen::VectorXd best = genes;
  double best_reward = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < steps; ++s) {
    genes = env.apply(genes, argmax(network.forward(env.state(genes))));
    const double r = env.reward(genes);
    if (r > best_reward) {
      best_reward = r;
      best = genes;
    }
  }
  return best;
}

DqnResult train_dqn(const IsacScenario& scenario, const DqnConfig& config, const AllocationObserver& observer) {
  validate(config);
  DqnResult result;
  result.scalarization = config.scalarization > 0.0 ? config.scalarization : calibrate_scalarization(scenario);
  const DqnEnvironment env(scenario, result.scalarization, config.levels);

  auto score = [&](const Eigen::VectorXd& genes) {
    const PowerAllocation alloc = scenario.allocation(genes);
    if (observer) observer(alloc);
    return reward(scenario, alloc, result.scalarization);
  };

  const Eigen::VectorXd start = env.initial_genes();
  result.epa_reward = score(start);
  // Q-learning sees rewards in units of the EPA reward so the value scale
  // does not depend on the physical constants.
  const double scale = result.epa_reward > 0.0 ? 1.0 / result.epa_reward : 1.0;

  Rng init_rng = make_stream(config.seed, {kInitSeed});
  Rng act_rng = make_stream(config.seed, {kActSeed});
  Rng replay_rng = make_stream(config.seed, {kReplaySeed});

  std::vector<int> sizes{env.state_size()};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(env.actions());
  Mlp online(sizes, init_rng);
  Mlp target = online;
  ReplayBuffer buffer(config.buffer_capacity);

  result.best_reward = -std::numeric_limits<double>::infinity();
  long step = 0, updates = 0;
  for (int episode = 0; episode < config.episodes; ++episode) {
    Eigen::VectorXd genes = start;
    Eigen::VectorXd state = env.state(genes);
    double r = result.epa_reward;
    for (int s = 0; s < config.steps_per_episode; ++s, ++step) {
      const bool exploit = uniform01(act_rng) < epsilon_schedule(step, config);
      const int action = exploit ? argmax(online.forward(state)) : uniform_index(act_rng, env.actions());

      genes = env.apply(genes, action);
      r = score(genes);
      const Eigen::VectorXd next_state = env.state(genes);
      buffer.push({state, action, r * scale, next_state});
      state = next_state;
      result.step_rewards.push_back(r);
      if (r > result.best_reward) {
        result.best_reward = r;
        result.best_genes = genes;
      }

      if (buffer.size() < std::max(config.warmup, 1)) continue;
      const auto batch = buffer.sample(config.batch_size, replay_rng);
      Eigen::MatrixXd states(env.state_size(), config.batch_size), nexts(env.state_size(), config.batch_size);
      std::vector<int> actions(static_cast<std::size_t>(config.batch_size));
      Eigen::VectorXd rewards(config.batch_size);
      for (int j = 0; j < config.batch_size; ++j) {
        states.col(j) = batch[j]->state;
        nexts.col(j) = batch[j]->next_state;
        actions[static_cast<std::size_t>(j)] = batch[j]->action;
        rewards(j) = batch[j]->reward;
      }
      const Eigen::MatrixXd q_next = target.forward_batch(nexts);
      const Eigen::VectorXd targets = rewards + config.discount * q_next.colwise().maxCoeff().transpose();
      result.losses.push_back(online.train_step(states, actions, targets, config.learning_rate));
      if (++updates % config.target_sync == 0) target = online;

      const double q_max = online.forward_batch(states).cwiseAbs().maxCoeff();
      if (!online.finite() || !std::isfinite(q_max) || q_max > config.q_bound)
        throw DqnDivergence("train_dqn: |Q| exceeded the divergence bound at step " + std::to_string(step),
                            result.step_rewards);
    }
    result.episode_rewards.push_back(r);
    result.best_trace.push_back(result.best_reward);
  }
  result.best_alloc = scenario.allocation(result.best_genes);
  result.network = std::move(online);
  return result;
}

}  // namespace nafd
