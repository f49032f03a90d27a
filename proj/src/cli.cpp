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

#include "nafd/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nafd/layout_io.hpp"

namespace nafd {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class Session {
 public:
  Session(const RunConfig& config, std::ostream& log) : config_(config), log_(log), dir_(config.output_dir) {
    fs::create_directories(dir_);
    if (!fs::is_directory(dir_)) throw std::runtime_error("output directory '" + dir_.string() + "' is unusable");
    if (!config.layout_file.empty()) {
      layout_text_ = read_file(config.layout_file);
      layout_ = layout_from_json(layout_text_);
    }
  }

  const std::optional<NetworkLayout>& loaded_layout() const { return layout_; }

  std::unique_ptr<IsacScenario> scenario(int n_antennas) const {
    ScenarioConfig cfg = config_.scenario;
    cfg.n_antennas = n_antennas;
    if (layout_) return std::make_unique<IsacScenario>(cfg, with_antenna_count(*layout_, n_antennas));
    return std::make_unique<IsacScenario>(cfg);
  }
  std::unique_ptr<IsacScenario> scenario() const { return scenario(config_.scenario.n_antennas); }

  fs::path artifact(const std::string& name) {
    written_.push_back(dir_ / name);
    return written_.back();
  }

  std::vector<fs::path> finish(const std::string& command) {
    json artifacts = json::array();
    for (const fs::path& p : written_)
      artifacts.push_back({{"file", p.filename().string()}, {"fnv1a64", hex(fnv1a64(read_file(p)))}});
    std::uint64_t input_hash = fnv1a64(config_.canonical_json);
    input_hash = fnv1a64(layout_text_, input_hash);
    const json manifest = {{"schema_version", kConfigSchemaVersion},
                           {"tool", "nafd_sim"},
                           {"command", command},
                           {"seed", config_.seed},
                           {"input_hash_fnv1a64", hex(input_hash)},
                           {"config", json::parse(config_.canonical_json)},
                           {"artifacts", artifacts}};
    const fs::path path = dir_ / "manifest.json";
    std::ofstream out(path);
    out << manifest.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed on '" + path.string() + "'");
    written_.push_back(path);
    for (const fs::path& p : written_) log_ << "wrote " << p.string() << '\n';
    return written_;
  }

 private:
  const RunConfig& config_;
  std::ostream& log_;
  fs::path dir_;
  std::string layout_text_;
  std::optional<NetworkLayout> layout_;
  std::vector<fs::path> written_;
};

}  // namespace

std::vector<fs::path> dispatch(const std::string& command, const RunConfig& config, std::ostream& log) {
  Session session(config, log);

  if (command == "evaluate") {
    const auto scenario = session.scenario();
    const PowerAllocation epa = scenario->allocation(scenario->epa_genes());
    write_points_csv(session.artifact("points.csv"), {"epa"}, {scenario->evaluate(epa)});
    write_sensing_csv(session.artifact("sensing.csv"), scenario->sensing(epa));
  } else if (command == "contour") {
    const NetworkLayout layout = session.loaded_layout()
                                     ? with_antenna_count(*session.loaded_layout(), config.scenario.n_antennas)
                                     : make_layout(config.scenario);
    write_contour_csv(session.artifact("contour.csv"),
                      run_contour(layout, config.grid, config.contour, config.scenario.threads));
    save_layout(layout, session.artifact("layout.json"));
  } else if (command == "sweep") {
    write_sweep_csv(session.artifact("sweep.csv"),
                    run_power_sweep(config.scenario, config.sweep.variable, config.sweep.values,
                                    config.sweep.n_antennas, session.loaded_layout()));
  } else if (command == "pareto") {
    std::vector<ParetoRun> runs;
    for (int n : config.pareto.n_antennas) {
      const auto scenario = session.scenario(n);
      log << "pareto: N = " << n << '\n';
      runs.push_back(run_pareto(*scenario, config.nsga2, config.pareto.with_dqn ? &config.dqn : nullptr));
    }
    write_pareto_csv(session.artifact("pareto.csv"), runs);
    write_history_csv(session.artifact("pareto_history.csv"), runs);
  } else if (command == "dqn") {
    const auto scenario = session.scenario();
    const DqnResult result = train_dqn(*scenario, config.dqn);
    write_dqn_csv(session.artifact("dqn_trace.csv"), session.artifact("dqn_steps.csv"), result);
    write_points_csv(session.artifact("dqn_points.csv"), {"epa", "dqn"},
                     {scenario->evaluate_genes(scenario->epa_genes()), scenario->evaluate(result.best_alloc)});
    result.network.save(session.artifact("dqn_qnet.txt"));
  } else if (command == "compare-schemes") {
    const auto scenario = session.scenario();
    write_schemes_csv(session.artifact("schemes.csv"),
                      compare_schemes(*scenario, config.schemes.sensing_symbols, config.schemes.block_symbols));
  } else {
    throw std::invalid_argument("unknown command '" + command + "'");
  }
  return session.finish(command);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cell-free NAFD ISAC simulator"};
  std::string command;
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<unsigned> threads;
  bool print_defaults = false;

  app.add_option("command", command, "Experiment to run")->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "Override, e.g. --set physics.p_max=2 (repeatable)");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--print-defaults", print_defaults, "Print the default configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (print_defaults) {
    out << default_config_json() << '\n';
    return 0;
  }
  if (command.empty()) {
    err << "error: a command is required (" << app.help() << ")\n";
    return 2;
  }

  try {
    std::vector<std::string> overrides = sets;
    if (seed) overrides.push_back("seed=" + std::to_string(*seed));
    if (!out_dir.empty()) overrides.push_back("output_dir=" + json(out_dir).dump());
    if (threads) overrides.push_back("monte_carlo.threads=" + std::to_string(*threads));
    const RunConfig config =
        load_config(config_path.empty() ? std::nullopt : std::optional<fs::path>(config_path), overrides);
    dispatch(command, config, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace nafd
