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
#include <string>

#include "nafd/geometry.hpp"

namespace nafd {

/// Layout document, schema "nafd-layout/1":
///
///   { "schema": "nafd-layout/1", "wavelength": <m>,
///     "nodes": [ { "kind": "dl_rru" | "ul_rru" | "dl_user" | "ul_user" | "target",
///                  "x": <m>, "y": <m>,
///                  "orientation": <rad>, "n_antennas": <int>, "spacing": <m> }, ... ] }
///
/// Array fields are present on RRU nodes only; arrays are rebuilt as
/// centered ULAs. Node order within a kind is preserved.
std::string layout_to_json(const NetworkLayout& layout);
NetworkLayout layout_from_json(const std::string& text);

void save_layout(const NetworkLayout& layout, const std::filesystem::path& path);
NetworkLayout load_layout(const std::filesystem::path& path);

}  // namespace nafd
