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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nafd/dqn.hpp"
#include "nafd/experiments.hpp"
#include "nafd/moo.hpp"
#include "nafd/scenario.hpp"

namespace nafd {

inline constexpr int kConfigSchemaVersion = 1;

/// Parse or validation failure; key() is the dotted path of the culprit.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct SweepSettings {
  SweepVariable variable = SweepVariable::kBeta;
  std::vector<double> values;
  std::vector<int> n_antennas;
};

struct SchemeSettings {
  std::vector<int> sensing_symbols;
  int block_symbols = 100;
};

struct ParetoSettings {
  std::vector<int> n_antennas;
  bool with_dqn = true;
};

struct RunConfig {
  std::uint64_t seed = 1;  ///< master seed; every other seed derives from it
  std::string output_dir = "out";
  std::string layout_file;  ///< optional saved layout replacing the generated one
  ScenarioConfig scenario;
  Nsga2Config nsga2;
  DqnConfig dqn;
  GridSpec grid;
  ContourSettings contour;
  SweepSettings sweep;
  SchemeSettings schemes;
  ParetoSettings pareto;
  /// Canonical JSON of the fully merged configuration.
  std::string canonical_json;
};

/// Every key with its default value, as pretty-printed JSON.
std::string default_config_json();

/// Defaults, then `file_text` (may be empty), then `key=value` overrides with
/// dotted keys. Unknown keys, type mismatches and invalid values throw
/// ConfigError.
RunConfig parse_config(const std::string& file_text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::optional<std::filesystem::path>& file,
                      const std::vector<std::string>& overrides = {});

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL);

}  // namespace nafd
