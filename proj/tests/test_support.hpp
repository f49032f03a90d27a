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

#include <vector>

#include "nafd/geometry.hpp"
#include "nafd/rng.hpp"

namespace nafd::testing {

inline Rru rru_at(const Position& center, int n, double orientation = kPi / 2, double wavelength = kDefaultWavelength) {
  return {center, make_ula(n, 0.5 * wavelength, orientation)};
}

/// Hand-built layout; orientation kPi/2 keeps a ULA broadside to the x axis.
inline NetworkLayout small_layout(const std::vector<Position>& dl, const std::vector<Position>& ul,
                                  const std::vector<Position>& dl_users, const std::vector<Position>& ul_users,
                                  const Position& target, int n) {
  NetworkLayout layout;
  for (const auto& p : dl) layout.dl_rrus.push_back(rru_at(p, n));
  for (const auto& p : ul) layout.ul_rrus.push_back(rru_at(p, n));
  layout.dl_users = dl_users;
  layout.ul_users = ul_users;
  layout.target = target;
  validate_layout(layout);
  return layout;
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace nafd::testing
