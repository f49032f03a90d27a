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

#include "nafd/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nafd/rng.hpp"

namespace nafd {
namespace {

Position uniform_in_disk(Rng& rng, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double t = 2.0 * kPi * unit(rng);
  return {r * std::cos(t), r * std::sin(t)};
}

void check_counts(int m_total, int k_ul, int k_dl, double region_radius) {
  if (m_total < 2 || m_total % 2 != 0)
    throw std::invalid_argument("m_total must be even and >= 2 (half DL, half UL); got " +
                                std::to_string(m_total));
  if (k_ul < 0 || k_dl < 0) throw std::invalid_argument("user counts must be non-negative");
  if (!(region_radius > 0.0)) throw std::invalid_argument("region_radius must be positive");
}

// Places `count` points uniformly in the disk, rejecting any closer than
// kMinSeparation to an already placed point.
class DiskPlacer {
 public:
  DiskPlacer(Rng& rng, double radius, std::vector<Position> occupied)
      : rng_(rng), radius_(radius), occupied_(std::move(occupied)) {}

  Position place(const std::string& name) {
    constexpr int kMaxAttempts = 10000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const Position p = uniform_in_disk(rng_, radius_);
      bool ok = true;
      for (const auto& q : occupied_) {
        if ((p - q).norm() < kMinSeparation) {
          ok = false;
          break;
        }
      }
      if (ok) {
        occupied_.push_back(p);
        return p;
      }
    }
    throw std::runtime_error("could not place " + name + " with minimum separation " +
                             std::to_string(kMinSeparation) + " m after " + std::to_string(kMaxAttempts) +
                             " attempts");
  }

 private:
  Rng& rng_;
  double radius_;
  std::vector<Position> occupied_;
};

}  // namespace

double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

AntennaArray make_ula(int n, double spacing, double orientation) {
  if (n < 1) throw std::invalid_argument("antenna array needs at least one element");
  AntennaArray array;
  array.orientation = orientation;
  array.spacing = spacing;
  array.offsets.resize(2, n);
  const Eigen::Vector2d axis(std::cos(orientation), std::sin(orientation));
  const double center = 0.5 * (n - 1);
  for (int j = 0; j < n; ++j) array.offsets.col(j) = (j - center) * spacing * axis;
  return array;
}

void validate_layout(const NetworkLayout& layout) {
  if (layout.dl_rrus.empty() || layout.ul_rrus.empty())
    throw std::invalid_argument("layout needs at least one DL-RRU and one UL-RRU");
  if (!(layout.wavelength > 0.0)) throw std::invalid_argument("layout wavelength must be positive");
  const auto n = layout.dl_rrus.front().array.size();
  std::vector<std::pair<std::string, Position>> nodes;
  auto add = [&](const std::string& kind, const auto& list) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      if constexpr (std::is_same_v<std::decay_t<decltype(list[i])>, Rru>) {
        if (list[i].array.size() != n) throw std::invalid_argument("all RRUs must use the same antenna count");
        nodes.emplace_back(kind + "[" + std::to_string(i) + "]", list[i].center);
      } else {
        nodes.emplace_back(kind + "[" + std::to_string(i) + "]", list[i]);
      }
    }
  };
  add("dl_rru", layout.dl_rrus);
  add("ul_rru", layout.ul_rrus);
  add("dl_user", layout.dl_users);
  add("ul_user", layout.ul_users);
  nodes.emplace_back("target", layout.target);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].second.allFinite()) throw std::invalid_argument(nodes[i].first + " has a non-finite position");
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if ((nodes[i].second - nodes[j].second).norm() < kMinSeparation)
        throw std::invalid_argument(nodes[i].first + " and " + nodes[j].first + " are closer than " +
                                    std::to_string(kMinSeparation) + " m");
    }
  }
}

NetworkLayout make_circle_deployment(int m_total, double circle_radius, int k_ul, int k_dl,
                                     double region_radius, std::uint64_t seed, int n_antennas,
                                     double wavelength) {
  check_counts(m_total, k_ul, k_dl, region_radius);
  if (!(circle_radius > 0.0)) throw std::invalid_argument("circle_radius must be positive");
  NetworkLayout layout;
  layout.wavelength = wavelength;
  std::vector<Position> occupied;
  for (int i = 0; i < m_total; ++i) {
    const double angle = 2.0 * kPi * i / m_total;
    Rru rru{circle_radius * Position(std::cos(angle), std::sin(angle)),
            make_ula(n_antennas, 0.5 * wavelength, wrap_angle(angle + 0.5 * kPi))};
    occupied.push_back(rru.center);
    (i % 2 == 0 ? layout.dl_rrus : layout.ul_rrus).push_back(std::move(rru));
  }
  Rng rng = make_stream(seed, {0x6c61796f7574ULL, 1});
  DiskPlacer placer(rng, region_radius, std::move(occupied));
  for (int k = 0; k < k_ul; ++k) layout.ul_users.push_back(placer.place("ul_user[" + std::to_string(k) + "]"));
  for (int l = 0; l < k_dl; ++l) layout.dl_users.push_back(placer.place("dl_user[" + std::to_string(l) + "]"));
  layout.target = placer.place("target");
  return layout;
}

NetworkLayout make_random_deployment(int m_total, int k_ul, int k_dl, double region_radius,
                                     std::uint64_t seed, int n_antennas, double wavelength) {
  check_counts(m_total, k_ul, k_dl, region_radius);
  NetworkLayout layout;
  layout.wavelength = wavelength;
  Rng rng = make_stream(seed, {0x6c61796f7574ULL, 2});
  DiskPlacer placer(rng, region_radius, {});
  std::vector<Position> centers;
  for (int i = 0; i < m_total; ++i) centers.push_back(placer.place("rru[" + std::to_string(i) + "]"));
  for (int k = 0; k < k_ul; ++k) layout.ul_users.push_back(placer.place("ul_user[" + std::to_string(k) + "]"));
  for (int l = 0; l < k_dl; ++l) layout.dl_users.push_back(placer.place("dl_user[" + std::to_string(l) + "]"));
  layout.target = placer.place("target");
  // Orientations come from their own stream so positions do not depend on N.
  Rng orient = make_stream(seed, {0x6c61796f7574ULL, 3});
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < m_total; ++i) {
    Rru rru{centers[i], make_ula(n_antennas, 0.5 * wavelength, angle(orient))};
    (i % 2 == 0 ? layout.dl_rrus : layout.ul_rrus).push_back(std::move(rru));
  }
  return layout;
}

NetworkLayout with_target(NetworkLayout layout, const Position& target) {
  layout.target = target;
  return layout;
}

NetworkLayout with_antenna_count(NetworkLayout layout, int n) {
  for (auto* list : {&layout.dl_rrus, &layout.ul_rrus})
    for (auto& rru : *list) rru.array = make_ula(n, rru.array.spacing, rru.array.orientation);
  return layout;
}

NetworkLayout transformed(const NetworkLayout& layout, double rotation, const Position& shift) {
  const Eigen::Rotation2Dd rot(rotation);
  const Eigen::Matrix2d r = rot.toRotationMatrix();
  NetworkLayout out = layout;
  for (auto* list : {&out.dl_rrus, &out.ul_rrus}) {
    for (auto& rru : *list) {
      rru.center = r * rru.center + shift;
      rru.array.offsets = r * rru.array.offsets;
      rru.array.orientation = wrap_angle(rru.array.orientation + rotation);
    }
  }
  for (auto* list : {&out.dl_users, &out.ul_users})
    for (auto& p : *list) p = r * p + shift;
  out.target = r * out.target + shift;
  return out;
}

BistaticGeometry bistatic_geometry(const Position& dl_rru, const Position& ul_rru, const Position& target) {
  const Position to_target_m = target - dl_rru;
  const Position to_target_n = target - ul_rru;
  BistaticGeometry g;
  g.d_m = to_target_m.norm();
  g.d_n = to_target_n.norm();
  if (g.d_m < kMinSeparation || g.d_n < kMinSeparation)
    throw std::domain_error("singular bistatic geometry: target within " + std::to_string(kMinSeparation) +
                            " m of an RRU");
  g.d_nm = g.d_m + g.d_n;
  g.dod_phi = wrap_angle(std::atan2(to_target_m.y(), to_target_m.x()));
  g.doa_theta = wrap_angle(std::atan2(to_target_n.y(), to_target_n.x()));
  return g;
}

BistaticGeometry bistatic_geometry(const NetworkLayout& layout, int m, int n) {
  if (m < 0 || m >= layout.m_dl() || n < 0 || n >= layout.m_ul())
    throw std::out_of_range("bistatic_geometry: RRU index out of range");
  return bistatic_geometry(layout.dl_rrus[m].center, layout.ul_rrus[n].center, layout.target);
}

SteeringPair steering_vectors(const BistaticGeometry& geom, const AntennaArray& tx_array,
                              const AntennaArray& rx_array, double wavelength) {
  if (tx_array.size() == 0 || rx_array.size() == 0) throw std::invalid_argument("empty antenna array");
  return {steering_vector(tx_array.offsets, geom.dod_phi, wavelength),
          steering_vector(rx_array.offsets, geom.doa_theta, wavelength)};
}

}  // namespace nafd
