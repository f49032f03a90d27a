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

#include "nafd/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nafd/rng.hpp"

namespace nafd {
namespace {

using nlohmann::json;

enum SeedKey : std::uint64_t { kNsgaSeed = 0x40, kDqnSeed = 0x50 };

json defaults() {
  const ScenarioConfig s;
  const FadingParams f;
  const Nsga2Config n;
  const DqnConfig d;
  const GridSpec g;
  return json{
      {"schema_version", kConfigSchemaVersion},
      {"seed", 1},
      {"output_dir", "out"},
      {"scenario",
       {{"deployment", "circle"},
        {"m_total", s.m_total},
        {"n_antennas", s.n_antennas},
        {"k_ul", s.k_ul},
        {"k_dl", s.k_dl},
        {"circle_radius", s.circle_radius},
        {"region_radius", s.region_radius},
        {"layout_file", ""}}},
      {"physics",
       {{"carrier_hz", s.carrier_hz},
        {"bandwidth_hz", s.bandwidth_hz},
        {"p_max", s.p_max},
        {"p_ul", s.p_ul},
        {"alpha_dl", f.alpha_dl},
        {"alpha_ul", f.alpha_ul},
        {"alpha_t", f.alpha_t},
        {"alpha_i", f.alpha_i},
        {"sigma2_dl_dbm", -83.0},
        {"sigma2_ul_dbm", -83.0},
        {"sigma2_sp_dl_dbm", -105.0},
        {"sigma2_sp_ul_dbm", -105.0},
        {"sigma2_n_dbm", -105.0},
        {"reference_distance", f.reference_distance},
        {"gain_tx", s.gain_tx},
        {"gain_rx", s.gain_rx},
        {"rcs", s.rcs}}},
      {"model", {{"numerator", "literal"}, {"combiner", "zf"}, {"prior_offset", {0.0, 0.0}}}},
      {"weights", {{"downlink", 1.0}, {"uplink", 1.0}, {"position", 1.0}, {"orientation", 1.0}}},
      {"monte_carlo", {{"trials", s.trials}, {"threads", 1}}},
      {"nsga2",
       {{"population", n.population},
        {"generations", n.generations},
        {"crossover_probability", n.crossover_probability},
        {"crossover_eta", n.crossover_eta},
        {"mutation_probability", n.mutation_probability},
        {"mutation_eta", n.mutation_eta}}},
      {"dqn",
       {{"episodes", d.episodes},
        {"steps_per_episode", d.steps_per_episode},
        {"levels", d.levels},
        {"hidden", d.hidden},
        {"learning_rate", d.learning_rate},
        {"discount", d.discount},
        {"buffer_capacity", d.buffer_capacity},
        {"batch_size", d.batch_size},
        {"target_sync", d.target_sync},
        {"warmup", d.warmup},
        {"epsilon_start", d.epsilon_start},
        {"epsilon_end", d.epsilon_end},
        {"anneal_steps", d.anneal_steps},
        {"q_bound", d.q_bound},
        {"scalarization", d.scalarization}}},
      {"contour",
       {{"pilot_share", 0.25},
        {"x_min", g.x_min},
        {"x_max", g.x_max},
        {"y_min", g.y_min},
        {"y_max", g.y_max},
        {"nx", g.nx},
        {"ny", g.ny}}},
      {"sweep",
       {{"variable", "beta"},
        {"values", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}},
        {"n_antennas", {4, 8, 16}}}},
      {"schemes", {{"sensing_symbols", {5, 10, 15, 20, 25, 30, 35, 40, 45, 50}}, {"block_symbols", 100}}},
      {"pareto", {{"n_antennas", {4, 16}}, {"with_dqn", true}}},
  };
}

std::string type_name(const json& v) {
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  return v.type_name();
}

// Integers are accepted where a float is expected, not the reverse.
bool compatible(const json& expected, const json& value) {
  if (expected.is_number_float()) return value.is_number();
  if (expected.is_number_integer()) return value.is_number_integer();
  return expected.type() == value.type();
}

void check_value(const json& expected, const json& value, const std::string& key) {
  if (!compatible(expected, value))
    throw ConfigError(key, "expected " + type_name(expected) + ", got " + type_name(value));
  if (expected.is_array() && !expected.empty())
    for (std::size_t i = 0; i < value.size(); ++i)
      check_value(expected.front(), value[i], key + "[" + std::to_string(i) + "]");
}

void merge(json& base, const json& patch, const std::string& prefix) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError(key, "unknown key");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      if (!it->is_object()) throw ConfigError(key, "expected object, got " + type_name(*it));
      merge(slot, *it, key);
    } else {
      check_value(slot, *it, key);
      slot = *it;
    }
  }
}

void collect_leaves(const json& node, const std::string& prefix, std::vector<std::string>& out) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object())
      collect_leaves(*it, key, out);
    else
      out.push_back(key);
  }
}

// A bare leaf name resolves when it is unique, so `p_max=2` works.
std::string resolve_key(const json& base, const std::string& key) {
  if (key.find('.') != std::string::npos || base.contains(key)) return key;
  std::vector<std::string> leaves, hits;
  collect_leaves(base, "", leaves);
  for (const std::string& l : leaves)
    if (l.size() > key.size() && l.compare(l.size() - key.size() - 1, std::string::npos, "." + key) == 0)
      hits.push_back(l);
  if (hits.size() == 1) return hits.front();
  if (hits.empty()) throw ConfigError(key, "unknown key");
  throw ConfigError(key, "ambiguous key; use the full dotted path");
}

void apply_override(json& base, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value");
  const std::string key = resolve_key(base, assignment.substr(0, eq));
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;  // bare words are strings

  json patch = value;
  std::string rest = key;
  std::vector<std::string> parts;
  for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest.erase(0, pos + 1))
    parts.push_back(rest.substr(0, pos));
  parts.push_back(rest);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  merge(base, patch, "");
}

class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {}

  const json& at(const std::string& key) const {
    const json* node = &root_;
    std::string rest = key;
    for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest.erase(0, pos + 1))
      node = &node->at(rest.substr(0, pos));
    return node->at(rest);
  }
  double number(const std::string& key) const { return at(key).get<double>(); }
  long integer(const std::string& key) const { return at(key).get<long>(); }
  int small(const std::string& key) const {
    const long v = integer(key);
    if (v < -1000000000L || v > 1000000000L) throw ConfigError(key, "value out of range");
    return static_cast<int>(v);
  }
  std::string text(const std::string& key) const { return at(key).get<std::string>(); }
  bool flag(const std::string& key) const { return at(key).get<bool>(); }

  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be positive and finite");
    return v;
  }
  double non_negative(const std::string& key) const {
    const double v = number(key);
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be non-negative and finite");
    return v;
  }
  double unit(const std::string& key) const {
    const double v = number(key);
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key, "must lie in [0, 1]");
    return v;
  }
  int at_least(const std::string& key, int lo) const {
    const int v = small(key);
    if (v < lo) throw ConfigError(key, "must be >= " + std::to_string(lo));
    return v;
  }
  std::vector<int> counts(const std::string& key) const {
    std::vector<int> v = at(key).get<std::vector<int>>();
    if (v.empty()) throw ConfigError(key, "must not be empty");
    for (int x : v)
      if (x < 1) throw ConfigError(key, "entries must be >= 1");
    return v;
  }

 private:
  const json& root_;
};

RunConfig convert(const json& root) {
  const Reader r(root);
  RunConfig c;
  if (r.integer("schema_version") != kConfigSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(r.integer("schema_version")));
  if (!root.at("seed").is_number_integer() || root.at("seed").get<double>() < 0.0)
    throw ConfigError("seed", "must be a non-negative integer");
  c.seed = root.at("seed").get<std::uint64_t>();
  c.output_dir = r.text("output_dir");
  if (c.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");

  ScenarioConfig& s = c.scenario;
  const std::string deployment = r.text("scenario.deployment");
  if (deployment == "circle")
    s.deployment = DeploymentKind::kCircle;
  else if (deployment == "random")
    s.deployment = DeploymentKind::kRandom;
  else
    throw ConfigError("scenario.deployment", "expected 'circle' or 'random', got '" + deployment + "'");
  s.m_total = r.at_least("scenario.m_total", 2);
  if (s.m_total % 2) throw ConfigError("scenario.m_total", "must be even (half DL, half UL)");
  s.n_antennas = r.at_least("scenario.n_antennas", 1);
  s.k_ul = r.at_least("scenario.k_ul", 0);
  s.k_dl = r.at_least("scenario.k_dl", 1);
  s.circle_radius = r.positive("scenario.circle_radius");
  s.region_radius = r.positive("scenario.region_radius");
  c.layout_file = r.text("scenario.layout_file");

  s.carrier_hz = r.positive("physics.carrier_hz");
  s.bandwidth_hz = r.non_negative("physics.bandwidth_hz");
  s.p_max = r.positive("physics.p_max");
  s.p_ul = r.non_negative("physics.p_ul");
  s.fading.alpha_dl = r.positive("physics.alpha_dl");
  s.fading.alpha_ul = r.positive("physics.alpha_ul");
  s.fading.alpha_t = r.positive("physics.alpha_t");
  s.fading.alpha_i = r.positive("physics.alpha_i");
  auto dbm = [&](const std::string& key) {
    const double v = r.number(key);
    if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
    return dbm_to_watt(v);
  };
  s.fading.sigma2_dl = dbm("physics.sigma2_dl_dbm");
  s.fading.sigma2_ul = dbm("physics.sigma2_ul_dbm");
  s.fading.sigma2_sp_dl = dbm("physics.sigma2_sp_dl_dbm");
  s.fading.sigma2_sp_ul = dbm("physics.sigma2_sp_ul_dbm");
  s.sigma2_n = dbm("physics.sigma2_n_dbm");
  s.fading.reference_distance = r.non_negative("physics.reference_distance");
  s.gain_tx = r.positive("physics.gain_tx");
  s.gain_rx = r.positive("physics.gain_rx");
  s.rcs = r.positive("physics.rcs");

  const std::string numerator = r.text("model.numerator");
  if (numerator == "literal")
    s.numerator = NumeratorMode::kLiteral;
  else if (numerator == "coherent")
    s.numerator = NumeratorMode::kCoherent;
  else
    throw ConfigError("model.numerator", "expected 'literal' or 'coherent', got '" + numerator + "'");
  const std::string combiner = r.text("model.combiner");
  if (combiner == "zf")
    s.combiner = CombinerMode::kZf;
  else if (combiner == "mrc")
    s.combiner = CombinerMode::kMrc;
  else
    throw ConfigError("model.combiner", "expected 'zf' or 'mrc', got '" + combiner + "'");
  const auto offset = r.at("model.prior_offset").get<std::vector<double>>();
  if (offset.size() != 2) throw ConfigError("model.prior_offset", "expected [x, y]");
  s.prior_offset = Position(offset[0], offset[1]);

  s.rate_weights.downlink = r.non_negative("weights.downlink");
  s.rate_weights.uplink = r.non_negative("weights.uplink");
  s.sensing_weights.position = r.non_negative("weights.position");
  s.sensing_weights.orientation = r.non_negative("weights.orientation");
  s.trials = r.at_least("monte_carlo.trials", 1);
  s.threads = static_cast<unsigned>(r.at_least("monte_carlo.threads", 1));
  s.seed = c.seed;

  Nsga2Config& n = c.nsga2;
  n.population = r.at_least("nsga2.population", 4);
  if (n.population % 2) throw ConfigError("nsga2.population", "must be even");
  n.generations = r.at_least("nsga2.generations", 0);
  n.crossover_probability = r.unit("nsga2.crossover_probability");
  n.crossover_eta = r.non_negative("nsga2.crossover_eta");
  n.mutation_probability = r.number("nsga2.mutation_probability");
  if (n.mutation_probability > 1.0) throw ConfigError("nsga2.mutation_probability", "must be <= 1");
  n.mutation_eta = r.non_negative("nsga2.mutation_eta");
  n.seed = derive_seed(c.seed, {kNsgaSeed});
  n.threads = s.threads;

  DqnConfig& d = c.dqn;
  d.episodes = r.at_least("dqn.episodes", 1);
  d.steps_per_episode = r.at_least("dqn.steps_per_episode", 1);
  d.levels = r.at_least("dqn.levels", 1);
  d.hidden = r.counts("dqn.hidden");
  d.learning_rate = r.positive("dqn.learning_rate");
  d.discount = r.unit("dqn.discount");
  if (d.discount >= 1.0) throw ConfigError("dqn.discount", "must be < 1");
  d.buffer_capacity = r.at_least("dqn.buffer_capacity", 1);
  d.batch_size = r.at_least("dqn.batch_size", 1);
  d.target_sync = r.at_least("dqn.target_sync", 1);
  d.warmup = r.at_least("dqn.warmup", 0);
  d.epsilon_start = r.unit("dqn.epsilon_start");
  d.epsilon_end = r.unit("dqn.epsilon_end");
  if (d.epsilon_end < d.epsilon_start) throw ConfigError("dqn.epsilon_end", "must be >= dqn.epsilon_start");
  d.anneal_steps = r.at_least("dqn.anneal_steps", 0);
  d.q_bound = r.positive("dqn.q_bound");
  d.scalarization = r.number("dqn.scalarization");
  d.seed = derive_seed(c.seed, {kDqnSeed});

  c.contour.pilot_share = r.unit("contour.pilot_share");
  if (c.contour.pilot_share == 0.0) throw ConfigError("contour.pilot_share", "must be positive");
  c.grid.x_min = r.number("contour.x_min");
  c.grid.x_max = r.number("contour.x_max");
  c.grid.y_min = r.number("contour.y_min");
  c.grid.y_max = r.number("contour.y_max");
  if (!(c.grid.x_max >= c.grid.x_min)) throw ConfigError("contour.x_max", "must be >= contour.x_min");
  if (!(c.grid.y_max >= c.grid.y_min)) throw ConfigError("contour.y_max", "must be >= contour.y_min");
  c.grid.nx = r.at_least("contour.nx", 1);
  c.grid.ny = r.at_least("contour.ny", 1);

  const std::string variable = r.text("sweep.variable");
  if (variable == "beta")
    c.sweep.variable = SweepVariable::kBeta;
  else if (variable == "alpha")
    c.sweep.variable = SweepVariable::kAlpha;
  else
    throw ConfigError("sweep.variable", "expected 'beta' or 'alpha', got '" + variable + "'");
  c.sweep.values = r.at("sweep.values").get<std::vector<double>>();
  if (c.sweep.values.empty()) throw ConfigError("sweep.values", "must not be empty");
  c.sweep.n_antennas = r.counts("sweep.n_antennas");

  c.schemes.sensing_symbols = r.counts("schemes.sensing_symbols");
  c.schemes.block_symbols = r.at_least("schemes.block_symbols", 1);
  for (int sym : c.schemes.sensing_symbols)
    if (sym > c.schemes.block_symbols)
      throw ConfigError("schemes.sensing_symbols", "entries must not exceed schemes.block_symbols");

  c.pareto.n_antennas = r.counts("pareto.n_antennas");
  c.pareto.with_dqn = r.flag("pareto.with_dqn");

  // Physics feeding the contour runner.
  c.contour.p_max = s.p_max;
  c.contour.prior_offset = s.prior_offset;
  c.contour.weights = s.sensing_weights;
  c.contour.radar.gain_tx = s.gain_tx;
  c.contour.radar.gain_rx = s.gain_rx;
  c.contour.radar.rcs = s.rcs;
  c.contour.radar.bandwidth = s.bandwidth_hz;
  c.contour.radar.sigma2_n = s.sigma2_n;
  c.contour.radar.wavelength = wavelength_from_frequency(s.carrier_hz);

  try {
    validate(c.scenario);
    validate(c.dqn);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config", e.what());
  }
  c.canonical_json = root.dump(2);
  return c;
}

}  // namespace

std::string default_config_json() { return defaults().dump(2); }

RunConfig parse_config(const std::string& file_text, const std::vector<std::string>& overrides) {
  json root = defaults();
  if (file_text.find_first_not_of(" \t\r\n") != std::string::npos) {
    json file = json::parse(file_text, nullptr, false);
    if (file.is_discarded()) throw ConfigError("<file>", "not well-formed JSON");
    if (!file.is_object()) throw ConfigError("<file>", "top level must be an object");
    merge(root, file, "");
  }
  for (const std::string& o : overrides) apply_override(root, o);
  return convert(root);
}

RunConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides) {
  std::string text;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("--config", "cannot read '" + file->string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_config(text, overrides);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash) {
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace nafd
