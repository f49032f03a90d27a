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
#include <vector>

#include "nafd/beamforming.hpp"
#include "nafd/channel.hpp"

namespace nafd {

/// Power factors. The per-RRU constraint is
///   sum_i alpha(m,i) ||w^c_{i,m}||^2 + beta(m) ||w^s_m||^2 <= 1.
struct PowerAllocation {
  Eigen::MatrixXd alpha;  ///< M_dl x K_dl data power factors
  Eigen::VectorXd beta;   ///< M_dl pilot power factors
  double p_max = 1.0;     ///< per-RRU maximum transmit power (W)
  Eigen::VectorXd p_ul;   ///< K_ul uplink transmit powers (W)
};

/// Left-hand side of the per-RRU power constraint, one entry per DL-RRU.
Eigen::VectorXd constraint_load(const PowerAllocation& alloc, const BeamSet& beams);
bool satisfies_power_constraint(const PowerAllocation& alloc, const BeamSet& beams, double tolerance = 1e-9);

/// Shape and sign checks; throws std::invalid_argument.
void validate(const PowerAllocation& alloc, int m_dl, int k_dl, int k_ul);

enum class NumeratorMode {
  kLiteral,   ///< sum_m p_max alpha(m,l) |mu_ll|^2 with the stacked effective CSI
  kCoherent,  ///< |sum_m sqrt(p_max alpha(m,l)) mu_ll,m|^2, per-RRU coherent combining
};

/// Additive pieces of one SINR.
struct SinrTerms {
  double signal = 0.0;
  double inter_user = 0.0;      ///< same-direction users
  double cross_link = 0.0;      ///< DL: UL-user interference; UL: residual DL-to-UL interference
  double pilot_residual = 0.0;  ///< pilot left after imperfect cancellation
  double noise = 0.0;

  double denominator() const { return inter_user + cross_link + pilot_residual + noise; }
  double sinr() const { return signal / denominator(); }
};

/// Everything an SINR needs from one realization that does not depend on the
/// power allocation. Extracting it once lets many allocations share the same
/// channel draws (common random numbers).
struct LinkFeatures {
  std::vector<ComplexMatrix> mu_dl;     ///< per DL-RRU m: K_dl x K_dl, (l,i) = g_{dl,l,m}^H w^c_{i,m}
  Eigen::MatrixXd user_to_user2;        ///< K_dl x K_ul, |g_{t,l,k}|^2
  Eigen::MatrixXd pilot_dl2;            ///< K_dl x M_dl, |g~_{dl,l,m}^H w^s_m|^2
  Eigen::MatrixXd combiner_gain2;       ///< K_ul x K_ul, (k,i) = |v_k^H g_{ul,i}|^2
  std::vector<ComplexMatrix> cross_ul;  ///< per DL-RRU m: K_ul x K_dl, (k,l) = v_k^H G~_{I,m} w^c_{l,m}
  Eigen::MatrixXd pilot_ul2;            ///< K_ul x M_dl, |v_k^H G~_{I,m} w^s_m|^2
  Eigen::VectorXd combiner_norm2;       ///< K_ul, ||v_k||^2
};

LinkFeatures extract_features(const ChannelSet& channels, const BeamSet& beams);

SinrTerms downlink_terms(const LinkFeatures& f, const PowerAllocation& alloc, int l, double noise_power,
                         NumeratorMode mode = NumeratorMode::kLiteral);
SinrTerms uplink_terms(const LinkFeatures& f, const PowerAllocation& alloc, int k, double noise_power);

SinrTerms downlink_sinr_terms(const ChannelSet& channels, const BeamSet& beams, const PowerAllocation& alloc,
                              int l, const FadingParams& params, NumeratorMode mode = NumeratorMode::kLiteral);
SinrTerms uplink_sinr_terms(const ChannelSet& channels, const BeamSet& beams, const PowerAllocation& alloc,
                            int k, const FadingParams& params);

double downlink_sinr(const ChannelSet& channels, const BeamSet& beams, const PowerAllocation& alloc, int l,
                     const FadingParams& params, NumeratorMode mode = NumeratorMode::kLiteral);
double uplink_sinr(const ChannelSet& channels, const BeamSet& beams, const PowerAllocation& alloc, int k,
                   const FadingParams& params);

struct RateWeights {
  double downlink = 1.0;  ///< omega_D
  double uplink = 1.0;    ///< omega_U
};

struct RateReport {
  Eigen::VectorXd r_dl;  ///< bits/s/Hz per DL user
  Eigen::VectorXd r_ul;  ///< bits/s/Hz per UL user
  double f1 = 0.0;       ///< omega_D sum r_dl + omega_U sum r_ul
  int trials = 0;
  double std_err = 0.0;  ///< standard error of f1 over trials
};

/// Monte Carlo trial t uses channel seed derive_seed(seed, {t}), so the first
/// T trials of any longer run coincide with a T-trial run.
struct MonteCarloSpec {
  int trials = 200;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct CommModel {
  FadingParams fading;
  BeamPolicy beams;
  NumeratorMode numerator = NumeratorMode::kLiteral;
};

/// Pre-drawn realizations (channels, estimation errors and per-trial beams)
/// reduced to LinkFeatures. evaluate() is deterministic and cheap.
class RateEvaluator {
 public:
  RateEvaluator(const NetworkLayout& layout, const CommModel& model, const MonteCarloSpec& mc);

  RateReport evaluate(const PowerAllocation& alloc, const RateWeights& weights = {}) const;

  int trials() const { return static_cast<int>(features_.size()); }
  const LinkFeatures& trial(int t) const { return features_[t]; }
  const CommModel& model() const { return model_; }

 private:
  CommModel model_;
  int m_dl_ = 0, k_dl_ = 0, k_ul_ = 0;
  std::vector<LinkFeatures> features_;
};

/// Ergodic rates R = E[log2(1 + gamma)] with beams recomputed from every
/// trial's estimates.
RateReport ergodic_rates(const NetworkLayout& layout, const CommModel& model, const PowerAllocation& alloc,
                         const RateWeights& weights, const MonteCarloSpec& mc);

/// Monte Carlo mean and standard error of per-trial SINR sequences; exposed
/// for the rate reduction and its tests.
RateReport rates_from_sinr(const std::vector<Eigen::VectorXd>& dl_sinr, const std::vector<Eigen::VectorXd>& ul_sinr,
                           const RateWeights& weights);

}  // namespace nafd
