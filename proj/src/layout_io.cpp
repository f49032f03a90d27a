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

#include "nafd/layout_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nafd {

namespace {
constexpr const char* kSchema = "nafd-layout/1";
}

std::string layout_to_json(const NetworkLayout& layout) {
  nlohmann::json doc;
  doc["schema"] = kSchema;
  doc["wavelength"] = layout.wavelength;
  auto& nodes = doc["nodes"] = nlohmann::json::array();
  auto rru_node = [&](const char* kind, const Rru& rru) {
    nodes.push_back({{"kind", kind},
                     {"x", rru.center.x()},
                     {"y", rru.center.y()},
                     {"orientation", rru.array.orientation},
                     {"n_antennas", rru.array.size()},
                     {"spacing", rru.array.spacing}});
  };
  auto point_node = [&](const char* kind, const Position& p) {
    nodes.push_back({{"kind", kind}, {"x", p.x()}, {"y", p.y()}});
  };
  for (const auto& r : layout.dl_rrus) rru_node("dl_rru", r);
  for (const auto& r : layout.ul_rrus) rru_node("ul_rru", r);
  for (const auto& p : layout.dl_users) point_node("dl_user", p);
  for (const auto& p : layout.ul_users) point_node("ul_user", p);
  point_node("target", layout.target);
  return doc.dump(2);
}

NetworkLayout layout_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  if (doc.value("schema", std::string{}) != kSchema)
    throw std::invalid_argument(std::string("layout document: expected schema '") + kSchema + "'");
  NetworkLayout layout;
  layout.wavelength = doc.at("wavelength").get<double>();
  bool have_target = false;
  for (const auto& node : doc.at("nodes")) {
    const auto kind = node.at("kind").get<std::string>();
    const Position p(node.at("x").get<double>(), node.at("y").get<double>());
    if (kind == "dl_rru" || kind == "ul_rru") {
      Rru rru{p, make_ula(node.at("n_antennas").get<int>(), node.at("spacing").get<double>(),
                          node.at("orientation").get<double>())};
      (kind == "dl_rru" ? layout.dl_rrus : layout.ul_rrus).push_back(std::move(rru));
    } else if (kind == "dl_user") {
      layout.dl_users.push_back(p);
    } else if (kind == "ul_user") {
      layout.ul_users.push_back(p);
    } else if (kind == "target") {
      if (have_target) throw std::invalid_argument("layout document: more than one target");
      layout.target = p;
      have_target = true;
    } else {
      throw std::invalid_argument("layout document: unknown node kind '" + kind + "'");
    }
  }
  if (!have_target) throw std::invalid_argument("layout document: missing target");
  validate_layout(layout);
  return layout;
}

void save_layout(const NetworkLayout& layout, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write layout to '" + path.string() + "'");
  out << layout_to_json(layout) << '\n';
}

NetworkLayout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read layout from '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return layout_from_json(ss.str());
}

}  // namespace nafd
