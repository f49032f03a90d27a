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

#include <gtest/gtest.h>

#include "nafd/beamforming.hpp"
#include "nafd/channel.hpp"
#include "test_support.hpp"

namespace nafd {
namespace {

ComplexMatrix random_channels(int rows, int cols, std::uint64_t seed, bool spread_scales = true) {
  Rng rng(seed);
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    const double scale = spread_scales ? std::pow(10.0, -3.0 * j) : 1.0;  // users orders of magnitude apart
    for (int i = 0; i < rows; ++i) g(i, j) = complex_normal(rng, scale * scale);
  }
  return g;
}

TEST(ZeroForcing, SingleUserIsMatchedFilter) {
  const ComplexMatrix g = random_channels(8, 1, 3);
  const ComplexMatrix w = zf_data_beams(g);
  EXPECT_LT((w - g / g.norm()).norm(), 1e-12);
}

TEST(ZeroForcing, NullsUnderPerfectCsi) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int k = 1 + static_cast<int>(seed % 4);
    const ComplexMatrix g = random_channels(16, k, seed);
    const ComplexMatrix w = zf_data_beams(g);
    const ComplexMatrix mu = g.adjoint() * w;
    for (int l = 0; l < k; ++l) {
      EXPECT_NEAR(w.col(l).norm(), 1.0, 1e-12);
      for (int i = 0; i < k; ++i)
        if (i != l) EXPECT_LT(std::abs(mu(l, i)) / std::abs(mu(l, l)), 1e-10) << "seed " << seed;
    }
  }
}

TEST(ZeroForcing, AbsoluteNullsOnUnitVarianceChannels) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int k = 1 + static_cast<int>(seed % 16);
    const ComplexMatrix g = random_channels(16, k, seed + 50, false);
    const ComplexMatrix mu = g.adjoint() * zf_data_beams(g);
    for (int l = 0; l < k; ++l)
      for (int i = 0; i < k; ++i)
        if (i != l) EXPECT_LT(std::abs(mu(l, i)), 1e-10) << "seed " << seed;
  }
}

TEST(ZeroForcing, OrthogonalChannelsGiveMatchedFilters) {
  ComplexMatrix g = ComplexMatrix::Zero(6, 2);
  g(0, 0) = {2.0, 1.0};
  g(3, 0) = {0.0, -1.0};
  g(1, 1) = {0.5, 0.5};
  g(5, 1) = {1.0, 0.0};
  const ComplexMatrix w = zf_data_beams(g);
  for (int l = 0; l < 2; ++l) EXPECT_LT((w.col(l) - g.col(l) / g.col(l).norm()).norm(), 1e-12);
}

TEST(ZeroForcing, RejectsDegenerateInputs) {
  EXPECT_THROW(zf_data_beams(random_channels(2, 3, 1)), std::invalid_argument);
  ComplexMatrix g = random_channels(4, 2, 1, false);
  g.col(1) = g.col(0) * std::complex<double>(0.0, 2.0);
  EXPECT_THROW(zf_data_beams(g), std::domain_error);
  g.col(1).setZero();
  EXPECT_THROW(zf_data_beams(g), std::domain_error);
}

TEST(ZeroForcing, WorksOnFloat) {
  const Eigen::MatrixXcf g = random_channels(6, 2, 5, false).cast<std::complex<float>>();
  const Eigen::MatrixXcf w = zero_forcing_directions(g);
  EXPECT_LT(std::abs((g.adjoint() * w)(0, 1)), 1e-5f);
}

TEST(Combiners, MrcSingleUser) {
  const ComplexMatrix g = random_channels(8, 1, 9);
  EXPECT_LT((uplink_combiners(g, CombinerMode::kMrc) - g / g.norm()).norm(), 1e-12);
  EXPECT_LT((uplink_combiners(g, CombinerMode::kMrc) - uplink_combiners(g, CombinerMode::kZf)).norm(), 1e-12);
}

TEST(Combiners, ZfNullsAndUnitNorm) {
  const ComplexMatrix g = random_channels(12, 3, 17);
  const ComplexMatrix v = uplink_combiners(g, CombinerMode::kZf);
  const ComplexMatrix gain = v.adjoint() * g;
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(v.col(k).norm(), 1.0, 1e-12);
    for (int i = 0; i < 3; ++i)
      if (i != k) EXPECT_LT(std::abs(gain(k, i)) / g.col(i).norm(), 1e-10);
  }
  const ComplexMatrix unit = random_channels(12, 5, 18, false);
  const ComplexMatrix leak = uplink_combiners(unit, CombinerMode::kZf).adjoint() * unit;
  for (int k = 0; k < 5; ++k)
    for (int i = 0; i < 5; ++i)
      if (i != k) EXPECT_LT(std::abs(leak(k, i)), 1e-10);
  const ComplexMatrix mrc = uplink_combiners(g, CombinerMode::kMrc);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(mrc.col(k).norm(), 1.0, 1e-12);
}

TEST(SensingBeams, SingleAntennaIsOne) {
  const NetworkLayout lay = testing::small_layout({Position(-100, 0)}, {Position(100, 0)}, {Position(0, 40)}, {},
                                                  Position(10, -60), 1);
  const ComplexMatrix w = conjugate_sensing_beams(lay);
  ASSERT_EQ(w.rows(), 1);
  EXPECT_NEAR(std::abs(w(0, 0) - 1.0), 0.0, 1e-15);
}

TEST(SensingBeams, ConjugateGainIsN) {
  const NetworkLayout lay = make_circle_deployment(16, 200.0, 3, 3, 300.0, 2);
  const ComplexMatrix w = conjugate_sensing_beams(lay);
  for (int m = 0; m < lay.m_dl(); ++m) {
    const BistaticGeometry g = bistatic_geometry(lay, m, 0);
    const ComplexVector a = steering_vector(lay.dl_rrus[m].array.offsets, g.dod_phi, lay.wavelength);
    EXPECT_NEAR(std::norm(a.dot(w.col(m).conjugate())), 16.0, 1e-10);
    EXPECT_NEAR(w.col(m).norm(), 1.0, 1e-12);
  }
}

TEST(SensingBeams, OffTargetGainIsSmaller) {
  // 4-element lambda/2 ULA: |a(t1)^T conj(a(t2))| / sqrt(N) < sqrt(N) for t1 != t2.
  const double lambda = kDefaultWavelength;
  const AntennaArray ula = make_ula(4, lambda / 2, kPi / 2);
  const ComplexVector a1 = steering_vector(ula.offsets, 0.0, lambda);
  const ComplexVector a2 = steering_vector(ula.offsets, 0.5, lambda);
  const double gain = std::norm(a2.dot(a1)) / a2.squaredNorm();
  EXPECT_LT(gain, 4.0);
  // Hand value: array factor |sum_j exp(j pi (j - 1.5) sin 0.5)|^2 / 4.
  std::complex<double> af = 0.0;
  for (int j = 0; j < 4; ++j) af += std::polar(1.0, kPi * (j - 1.5) * std::sin(0.5));
  EXPECT_NEAR(gain, std::norm(af) / 4.0, 1e-12);
}

TEST(Beams, ComputeBeamsShapesAndPriorOffset) {
  const NetworkLayout lay = make_circle_deployment(8, 150.0, 2, 2, 250.0, 6, 4);
  const ChannelSet ch = draw_realization(lay, FadingParams{}, 3);
  const BeamSet exact = compute_beams(lay, ch);
  EXPECT_EQ(exact.w_c.rows(), 16);
  EXPECT_EQ(exact.w_c.cols(), 2);
  EXPECT_EQ(exact.w_s.rows(), 4);
  EXPECT_EQ(exact.w_s.cols(), 4);
  EXPECT_EQ(exact.v.cols(), 2);
  BeamPolicy off;
  off.prior_offset = Position(25.0, -10.0);
  const BeamSet shifted = compute_beams(lay, ch, off);
  EXPECT_EQ(shifted.w_c, exact.w_c);
  EXPECT_GT((shifted.w_s - exact.w_s).norm(), 1e-3);
  double per_user = 0.0;
  for (int m = 0; m < exact.m_dl(); ++m) per_user += exact.data_norm2(m, 0);
  EXPECT_NEAR(per_user, 1.0, 1e-12);
}

}  // namespace
}  // namespace nafd
