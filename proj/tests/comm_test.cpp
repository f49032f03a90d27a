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

#include <cmath>

#include "nafd/comm.hpp"
#include "nafd/moo.hpp"
#include "test_support.hpp"

namespace nafd {
namespace {

using testing::relative_error;
using testing::small_layout;

NetworkLayout test_layout(int n = 4) { return make_circle_deployment(8, 150.0, 2, 3, 250.0, 12, n); }

PowerAllocation random_allocation(const BeamSet& beams, int k_dl, int k_ul, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd genes(beams.m_dl() * (k_dl + 1));
  for (Eigen::Index i = 0; i < genes.size(); ++i) genes(i) = u(rng);
  Eigen::VectorXd p_ul(k_ul);
  for (int k = 0; k < k_ul; ++k) p_ul(k) = 0.1 + 0.3 * u(rng);
  return repair_to_constraint(genes, beams, 1.0, p_ul);
}

// Straight element-by-element transcription of the two SINR expressions,
// sharing nothing with the feature-based implementation.
double reference_dl_sinr(const ChannelSet& ch, const BeamSet& b, const PowerAllocation& a, int l,
                         const FadingParams& p) {
  const int n = ch.n_antennas, m_dl = b.m_dl(), k_dl = static_cast<int>(b.w_c.cols());
  auto stacked_gain = [&](int user, int beam) {
    std::complex<double> s = 0.0;
    for (int r = 0; r < m_dl * n; ++r) s += std::conj(ch.g_dl.truth(r, user)) * b.w_c(r, beam);
    return std::norm(s);
  };
  double signal = 0.0, interference = 0.0;
  for (int i = 0; i < k_dl; ++i) {
    double alpha_sum = 0.0;
    for (int m = 0; m < m_dl; ++m) alpha_sum += a.alpha(m, i);
    (i == l ? signal : interference) += a.p_max * alpha_sum * stacked_gain(l, i);
  }
  for (int k = 0; k < a.p_ul.size(); ++k) interference += a.p_ul(k) * std::norm(ch.g_t.truth(l, k));
  for (int m = 0; m < m_dl; ++m) {
    std::complex<double> s = 0.0;
    for (int j = 0; j < n; ++j) s += std::conj(ch.g_dl.error(m * n + j, l)) * b.w_s(j, m);
    interference += a.p_max * a.beta(m) * std::norm(s);
  }
  return signal / (interference + p.sigma2_dl);
}

double reference_ul_sinr(const ChannelSet& ch, const BeamSet& b, const PowerAllocation& a, int k,
                         const FadingParams& p) {
  const int n = ch.n_antennas, m_dl = b.m_dl(), m_ul = static_cast<int>(b.v.rows()) / n;
  const int k_ul = static_cast<int>(b.v.cols()), k_dl = static_cast<int>(b.w_c.cols());
  auto v_dot = [&](auto&& column) {
    std::complex<double> s = 0.0;
    for (int r = 0; r < m_ul * n; ++r) s += std::conj(b.v(r, k)) * column(r);
    return s;
  };
  double signal = 0.0, interference = 0.0;
  for (int i = 0; i < k_ul; ++i) {
    const double g = std::norm(v_dot([&](int r) { return ch.g_ul.truth(r, i); }));
    (i == k ? signal : interference) += a.p_ul(i) * g;
  }
  // Residual cross link G~_{I,m} applied to data and pilot beams of DL-RRU m.
  auto residual_times = [&](int m, auto&& beam) {
    return v_dot([&](int r) {
      std::complex<double> s = 0.0;
      for (int j = 0; j < n; ++j) s += ch.g_i.error(r, m * n + j) * beam(j);
      return s;
    });
  };
  for (int l = 0; l < k_dl; ++l) {
    std::complex<double> total = 0.0;
    for (int m = 0; m < m_dl; ++m)
      total += std::sqrt(a.p_max * a.alpha(m, l)) * residual_times(m, [&](int j) { return b.w_c(m * n + j, l); });
    interference += std::norm(total);
  }
  for (int m = 0; m < m_dl; ++m)
    interference += a.p_max * a.beta(m) * std::norm(residual_times(m, [&](int j) { return b.w_s(j, m); }));
  double vnorm2 = 0.0;
  for (int r = 0; r < m_ul * n; ++r) vnorm2 += std::norm(b.v(r, k));
  return signal / (interference + p.sigma2_ul * vnorm2);
}

TEST(Sinr, MatchesIndependentTranscription) {
  const FadingParams p;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const NetworkLayout lay = make_circle_deployment(8, 150.0, 2, 3, 250.0, seed, 4);
    const ChannelSet ch = draw_realization(lay, p, seed + 100);
    const BeamSet beams = compute_beams(lay, ch);
    const PowerAllocation a = random_allocation(beams, 3, 2, seed);
    for (int l = 0; l < 3; ++l)
      EXPECT_LT(relative_error(downlink_sinr(ch, beams, a, l, p), reference_dl_sinr(ch, beams, a, l, p)), 1e-12);
    for (int k = 0; k < 2; ++k)
      EXPECT_LT(relative_error(uplink_sinr(ch, beams, a, k, p), reference_ul_sinr(ch, beams, a, k, p)), 1e-12);
  }
}

TEST(Sinr, NoPowerNoSignal) {
  const FadingParams p;
  const NetworkLayout lay = test_layout();
  const ChannelSet ch = draw_realization(lay, p, 1);
  const BeamSet beams = compute_beams(lay, ch);
  PowerAllocation a{Eigen::MatrixXd::Zero(4, 3), Eigen::VectorXd::Zero(4), 1.0, Eigen::VectorXd::Zero(2)};
  for (int l = 0; l < 3; ++l) EXPECT_EQ(downlink_sinr(ch, beams, a, l, p), 0.0);
  for (int k = 0; k < 2; ++k) EXPECT_EQ(uplink_sinr(ch, beams, a, k, p), 0.0);
}

TEST(Sinr, SingleUserMatchedFilterSnr) {
  FadingParams p;
  p.sigma2_sp_dl = 0.0;
  const NetworkLayout lay = small_layout({Position(-100, 0)}, {Position(100, 0)}, {Position(-20, 30)}, {},
                                         Position(0, -50), 8);
  const ChannelSet ch = draw_realization(lay, p, 5);
  const BeamSet beams = compute_beams(lay, ch);
  PowerAllocation a{Eigen::MatrixXd::Constant(1, 1, 0.7), Eigen::VectorXd::Zero(1), 1.0, Eigen::VectorXd()};
  const double want = a.p_max * 0.7 * ch.g_dl.truth.squaredNorm() / p.sigma2_dl;
  EXPECT_LT(relative_error(downlink_sinr(ch, beams, a, 0, p), want), 1e-12);
}

TEST(Sinr, PerfectCancellationUplink) {
  FadingParams p;
  p.sigma2_sp_ul = 0.0;
  const NetworkLayout lay = small_layout({Position(-100, 0), Position(0, 100)}, {Position(100, 0)},
                                         {Position(-20, 30)}, {Position(40, -10)}, Position(0, -50), 4);
  const ChannelSet ch = draw_realization(lay, p, 8);
  const BeamSet beams = compute_beams(lay, ch);
  PowerAllocation a{Eigen::MatrixXd::Constant(2, 1, 0.4), Eigen::VectorXd::Constant(2, 3.0), 1.0,
                    Eigen::VectorXd::Constant(1, 0.2)};
  const SinrTerms t = uplink_sinr_terms(ch, beams, a, 0, p);
  EXPECT_EQ(t.cross_link, 0.0);
  EXPECT_EQ(t.pilot_residual, 0.0);
  const double want = 0.2 * std::norm((beams.v.col(0).adjoint() * ch.g_ul.truth.col(0))(0)) / p.sigma2_ul;
  EXPECT_LT(relative_error(t.sinr(), want), 1e-12);

  a.p_ul.setZero();
  EXPECT_EQ(uplink_sinr(ch, beams, a, 0, p), 0.0);
}

TEST(Sinr, ZfResidualsVanishWithPerfectCsi) {
  FadingParams p;
  p.sigma2_sp_dl = 0.0;
  p.sigma2_sp_ul = 0.0;
  const NetworkLayout lay = make_circle_deployment(16, 200.0, 3, 3, 300.0, 4, 16);
  const ChannelSet ch = draw_realization(lay, p, 2);
  const BeamSet beams = compute_beams(lay, ch);
  const PowerAllocation a = random_allocation(beams, 3, 3, 2);
  for (int l = 0; l < 3; ++l) {
    const SinrTerms t = downlink_sinr_terms(ch, beams, a, l, p);
    EXPECT_LT(t.inter_user, 1e-10 * t.signal);
    EXPECT_EQ(t.pilot_residual, 0.0);
  }
  for (int k = 0; k < 3; ++k) {
    const SinrTerms t = uplink_sinr_terms(ch, beams, a, k, p);
    EXPECT_LT(t.inter_user, 1e-10 * t.signal);
    EXPECT_EQ(t.cross_link, 0.0);
    EXPECT_EQ(t.pilot_residual, 0.0);
  }
}

TEST(Sinr, GlobalPhaseInvariance) {
  const FadingParams p;
  const NetworkLayout lay = test_layout();
  ChannelSet ch = draw_realization(lay, p, 6);
  const BeamSet beams = compute_beams(lay, ch);
  const PowerAllocation a = random_allocation(beams, 3, 2, 6);
  const double dl = downlink_sinr(ch, beams, a, 1, p), ul = uplink_sinr(ch, beams, a, 0, p);

  const std::complex<double> phase = std::polar(1.0, 1.234);
  for (SplitChannel* s : {&ch.g_dl, &ch.g_ul}) {
    s->truth.col(1) *= phase;
    s->estimate.col(1) *= phase;
    s->error.col(1) *= phase;
  }
  const BeamSet rotated = compute_beams(lay, ch);
  EXPECT_LT(relative_error(downlink_sinr(ch, rotated, a, 1, p), dl), 1e-9);
  EXPECT_LT(relative_error(uplink_sinr(ch, rotated, a, 0, p), ul), 1e-9);
}

TEST(Sinr, LiteralNumeratorStrictlyIncreasingInAlpha) {
  const FadingParams p;
  const NetworkLayout lay = test_layout();
  const ChannelSet ch = draw_realization(lay, p, 7);
  const BeamSet beams = compute_beams(lay, ch);
  PowerAllocation a = random_allocation(beams, 3, 2, 7);
  double last = downlink_sinr_terms(ch, beams, a, 2, p).signal;
  for (int step = 0; step < 5; ++step) {
    a.alpha(1, 2) *= 1.3;
    const double now = downlink_sinr_terms(ch, beams, a, 2, p).signal;
    EXPECT_GT(now, last);
    last = now;
  }
}

TEST(Sinr, CoherentModeEqualsLiteralForOneRru) {
  const FadingParams p;
  const NetworkLayout lay = small_layout({Position(-100, 0)}, {Position(100, 0)}, {Position(-20, 30), Position(10, 60)},
                                         {Position(40, -10)}, Position(0, -50), 4);
  const ChannelSet ch = draw_realization(lay, p, 3);
  const BeamSet beams = compute_beams(lay, ch);
  const PowerAllocation a = random_allocation(beams, 2, 1, 3);
  for (int l = 0; l < 2; ++l)
    EXPECT_LT(relative_error(downlink_sinr(ch, beams, a, l, p, NumeratorMode::kCoherent),
                             downlink_sinr(ch, beams, a, l, p, NumeratorMode::kLiteral)),
              1e-12);
}

TEST(Rates, UnitSinrGivesOneBit) {
  const std::vector<Eigen::VectorXd> dl(5, Eigen::VectorXd::Ones(3)), ul(5, Eigen::VectorXd::Ones(2));
  const RateReport r = rates_from_sinr(dl, ul, {});
  EXPECT_EQ(r.r_dl, Eigen::VectorXd::Ones(3));
  EXPECT_EQ(r.r_ul, Eigen::VectorXd::Ones(2));
  EXPECT_DOUBLE_EQ(r.f1, 5.0);
  EXPECT_DOUBLE_EQ(r.std_err, 0.0);
}

TEST(Rates, WeightMaskingAndMonotonicity) {
  const NetworkLayout lay = test_layout();
  const CommModel model;
  const RateEvaluator eval(lay, model, {40, 3, 1});
  const ChannelSet ref = draw_realization(lay, model.fading, 999);
  const PowerAllocation a = random_allocation(compute_beams(lay, ref), 3, 2, 4);
  const RateReport both = eval.evaluate(a, {1.0, 1.0});
  const RateReport dl_only = eval.evaluate(a, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(dl_only.f1, both.r_dl.sum());
  EXPECT_LE(dl_only.f1, both.f1);
  EXPECT_LE(both.f1, eval.evaluate(a, {1.5, 1.0}).f1);
  EXPECT_LE(both.f1, eval.evaluate(a, {1.0, 2.0}).f1);
}

TEST(Rates, EvaluatorMatchesDirectSinrs) {
  const NetworkLayout lay = test_layout();
  const CommModel model;
  const MonteCarloSpec mc{12, 21, 1};
  const RateEvaluator eval(lay, model, mc);
  const ChannelSet ref = draw_realization(lay, model.fading, 999);
  const PowerAllocation a = random_allocation(compute_beams(lay, ref), 3, 2, 9);

  std::vector<Eigen::VectorXd> dl, ul;
  for (int t = 0; t < mc.trials; ++t) {
    const ChannelSet ch = draw_realization(lay, model.fading, derive_seed(mc.seed, {std::uint64_t(t)}));
    const BeamSet beams = compute_beams(lay, ch);
    Eigen::VectorXd d(3), u(2);
    for (int l = 0; l < 3; ++l) d(l) = reference_dl_sinr(ch, beams, a, l, model.fading);
    for (int k = 0; k < 2; ++k) u(k) = reference_ul_sinr(ch, beams, a, k, model.fading);
    dl.push_back(d);
    ul.push_back(u);
  }
  const RateReport want = rates_from_sinr(dl, ul, {});
  const RateReport got = eval.evaluate(a);
  EXPECT_LT(relative_error(got.f1, want.f1), 1e-12);
  EXPECT_LT(relative_error(got.std_err, want.std_err), 1e-9);
}

TEST(Rates, ThreadCountDoesNotChangeResults) {
  const NetworkLayout lay = test_layout();
  const CommModel model;
  const ChannelSet ref = draw_realization(lay, model.fading, 999);
  const PowerAllocation a = random_allocation(compute_beams(lay, ref), 3, 2, 10);
  const RateReport one = ergodic_rates(lay, model, a, {}, {30, 5, 1});
  const RateReport three = ergodic_rates(lay, model, a, {}, {30, 5, 3});
  EXPECT_EQ(one.f1, three.f1);
  EXPECT_EQ(one.std_err, three.std_err);
}

TEST(Rates, StandardErrorShrinksAsInverseRootTrials) {
  const NetworkLayout lay = test_layout();
  const CommModel model;
  const ChannelSet ref = draw_realization(lay, model.fading, 999);
  const PowerAllocation a = random_allocation(compute_beams(lay, ref), 3, 2, 11);
  const double se_1k = ergodic_rates(lay, model, a, {}, {1000, 31, 1}).std_err;
  const double se_4k = ergodic_rates(lay, model, a, {}, {4000, 31, 1}).std_err;
  EXPECT_NEAR(se_1k / se_4k, 2.0, 0.4);
}

TEST(PowerAllocation, ConstraintAndValidation) {
  const NetworkLayout lay = test_layout();
  const ChannelSet ch = draw_realization(lay, FadingParams{}, 1);
  const BeamSet beams = compute_beams(lay, ch);
  const PowerAllocation a = random_allocation(beams, 3, 2, 12);
  EXPECT_TRUE(satisfies_power_constraint(a, beams));
  EXPECT_LE(constraint_load(a, beams).maxCoeff(), 1.0 + 1e-12);
  PowerAllocation bad = a;
  bad.beta(0) = -1.0;
  EXPECT_THROW(validate(bad, 4, 3, 2), std::invalid_argument);
  EXPECT_THROW(validate(a, 4, 2, 2), std::invalid_argument);
}

}  // namespace
}  // namespace nafd
