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

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nafd/units.hpp"

namespace nafd {

using Position = Eigen::Vector2d;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Minimum distance between any two nodes (meters). Path loss d^-alpha is
/// singular at d = 0.
inline constexpr double kMinSeparation = 1.0;

/// Default carrier: 3.5 GHz.
inline const double kDefaultWavelength = wavelength_from_frequency(3.5e9);

/// Element positions of one RRU array relative to the RRU center.
struct AntennaArray {
  Eigen::Matrix2Xd offsets;  ///< column j is q_j (meters)
  double orientation = 0.0;  ///< axis angle of the line array (radians, CCW from +x)
  double spacing = 0.0;      ///< element spacing (meters)

  Eigen::Index size() const { return offsets.cols(); }
};

/// Centered uniform linear array of n elements along the direction `orientation`.
AntennaArray make_ula(int n, double spacing, double orientation);

struct Rru {
  Position center;
  AntennaArray array;
};

struct NetworkLayout {
  std::vector<Rru> dl_rrus;
  std::vector<Rru> ul_rrus;
  std::vector<Position> dl_users;
  std::vector<Position> ul_users;
  Position target = Position::Zero();
  double wavelength = kDefaultWavelength;

  int m_dl() const { return static_cast<int>(dl_rrus.size()); }
  int m_ul() const { return static_cast<int>(ul_rrus.size()); }
  int k_dl() const { return static_cast<int>(dl_users.size()); }
  int k_ul() const { return static_cast<int>(ul_users.size()); }
  /// Antennas per RRU (all RRUs share one array size).
  int n_antennas() const { return dl_rrus.empty() ? 0 : static_cast<int>(dl_rrus.front().array.size()); }
};

/// Throws std::invalid_argument when a structural invariant is broken
/// (empty RRU sets, mixed array sizes, nodes closer than kMinSeparation).
void validate_layout(const NetworkLayout& layout);

/// RRUs equally spaced on a circle, alternating DL/UL starting with DL at
/// angle 0. Users and target uniform in the disk of `region_radius`.
NetworkLayout make_circle_deployment(int m_total, double circle_radius, int k_ul, int k_dl,
                                     double region_radius, std::uint64_t seed, int n_antennas = 16,
                                     double wavelength = kDefaultWavelength);

/// Every node i.i.d. uniform in the disk, resampled to keep kMinSeparation.
NetworkLayout make_random_deployment(int m_total, int k_ul, int k_dl, double region_radius,
                                     std::uint64_t seed, int n_antennas = 16,
                                     double wavelength = kDefaultWavelength);

/// Same layout with the target moved; arrays and other nodes unchanged.
NetworkLayout with_target(NetworkLayout layout, const Position& target);

/// Same positions, arrays rebuilt with n elements (orientation/spacing kept).
NetworkLayout with_antenna_count(NetworkLayout layout, int n);

/// Applies x -> R x + t to every node and rotates every array by the same angle.
NetworkLayout transformed(const NetworkLayout& layout, double rotation, const Position& shift);

struct BistaticGeometry {
  double d_m = 0.0;        ///< DL-RRU -> target (m)
  double d_n = 0.0;        ///< target -> UL-RRU (m)
  double d_nm = 0.0;       ///< bistatic range d_m + d_n
  double dod_phi = 0.0;    ///< departure angle at the DL-RRU, (-pi, pi]
  double doa_theta = 0.0;  ///< arrival angle at the UL-RRU, (-pi, pi]
};

/// Angles point from each RRU toward the target. Throws std::domain_error on
/// a target closer than kMinSeparation to either RRU.
BistaticGeometry bistatic_geometry(const Position& dl_rru, const Position& ul_rru, const Position& target);
BistaticGeometry bistatic_geometry(const NetworkLayout& layout, int m, int n);

/// Maps an angle into (-pi, pi].
double wrap_angle(double angle);

// ---------------------------------------------------------------------------
// Array response. Templated on the scalar so the kernels work on any real
// Eigen offset matrix (double for the simulator, long double in oracles).

/// Unit wave vector k = [cos, sin]^T.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> wave_vector(Scalar angle) {
  using std::cos;
  using std::sin;
  return {cos(angle), sin(angle)};
}

/// Entries exp(-j 2 pi k^T q_j / lambda).
template <typename Derived>
Eigen::Matrix<std::complex<typename Derived::Scalar>, Eigen::Dynamic, 1> steering_vector(
    const Eigen::MatrixBase<Derived>& offsets, typename Derived::Scalar angle,
    typename Derived::Scalar wavelength) {
  using Scalar = typename Derived::Scalar;
  static_assert(Derived::RowsAtCompileTime == 2 || Derived::RowsAtCompileTime == Eigen::Dynamic);
  if (!(wavelength > Scalar(0))) throw std::domain_error("steering_vector: wavelength must be positive");
  const Eigen::Matrix<Scalar, 2, 1> k = wave_vector(angle);
  const Scalar scale = Scalar(-2) * Scalar(kPi) / wavelength;
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> out(offsets.cols());
  for (Eigen::Index j = 0; j < offsets.cols(); ++j) out(j) = std::polar(Scalar(1), scale * k.dot(offsets.col(j)));
  return out;
}

/// Per-element projection y cos(angle) - x sin(angle), i.e. the derivative of
/// k^T q with respect to the angle.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> transverse_projection(
    const Eigen::MatrixBase<Derived>& offsets, typename Derived::Scalar angle) {
  using std::cos;
  using std::sin;
  return (offsets.row(1) * cos(angle) - offsets.row(0) * sin(angle)).transpose();
}

/// A = sum of transverse projections, B = sum of their squares.
template <typename Scalar>
struct ArrayMoments {
  Scalar a = 0;
  Scalar b = 0;
};

template <typename Derived>
ArrayMoments<typename Derived::Scalar> array_moments(const Eigen::MatrixBase<Derived>& offsets,
                                                     typename Derived::Scalar angle) {
  const auto u = transverse_projection(offsets, angle);
  return {u.sum(), u.squaredNorm()};
}

struct SteeringPair {
  ComplexVector a_m;  ///< transmit steering at the DL-RRU
  ComplexVector b_n;  ///< receive steering at the UL-RRU
};

SteeringPair steering_vectors(const BistaticGeometry& geom, const AntennaArray& tx_array,
                              const AntennaArray& rx_array, double wavelength);

}  // namespace nafd
