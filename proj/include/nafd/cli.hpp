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
#include <iosfwd>
#include <string>
#include <vector>

#include "nafd/config.hpp"

namespace nafd {

inline const std::vector<std::string> kCommands = {"evaluate", "contour", "sweep", "pareto", "dqn",
                                                   "compare-schemes"};

/// Runs one experiment and writes its CSVs plus manifest.json into
/// config.output_dir. Returns the written paths, manifest last.
std::vector<std::filesystem::path> dispatch(const std::string& command, const RunConfig& config, std::ostream& log);

/// Full command line: parse, dispatch, report. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nafd
