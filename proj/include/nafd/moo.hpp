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
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nafd/beamforming.hpp"
#include "nafd/comm.hpp"

namespace nafd {

// ---------------------------------------------------------------------------
// Power-allocation genes.
//
// Genes are laid out per DL-RRU as [K_dl data shares, 1 pilot share], each in
// [0, 1]. A gene is the fraction of the RRU budget it consumes:
//   alpha(m,i) = g(m,i) / ||w^c_{i,m}||^2,   beta(m) = g(m,pilot) / ||w^s_m||^2,
// so the constraint load of RRU m is exactly the sum of its genes.

inline int genes_per_rru(int k_dl) { return k_dl + 1; }
inline int data_gene(int m, int i, int k_dl) { return m * genes_per_rru(k_dl) + i; }
inline int pilot_gene(int m, int k_dl) { return m * genes_per_rru(k_dl) + k_dl; }

/// Scales every overloaded RRU's genes by 1/load; feasible RRUs are untouched.
Eigen::VectorXd repair_genes(const Eigen::VectorXd& genes, int m_dl, int k_dl);

/// Genes -> factors through the beam norms (no repair).
PowerAllocation decode_genes(const Eigen::VectorXd& genes, const BeamSet& beams, double p_max,
                             const Eigen::VectorXd& p_ul);

/// Inverse of decode_genes.
Eigen::VectorXd encode_genes(const PowerAllocation& alloc, const BeamSet& beams);

/// repair_genes followed by decode_genes; the result meets the per-RRU
/// power constraint.
PowerAllocation repair_to_constraint(const Eigen::VectorXd& genes, const BeamSet& beams, double p_max,
                                     const Eigen::VectorXd& p_ul);

// ---------------------------------------------------------------------------
// NSGA-II, two maximized objectives.

using Objectives = Eigen::Vector2d;

/// a dominates b: a >= b in both objectives and a > b in at least one.
inline bool dominates(const Objectives& a, const Objectives& b) {
  return (a.array() >= b.array()).all() && (a.array() > b.array()).any();
}

/// Fronts as index lists into `points`, best front first.
std::vector<std::vector<int>> fast_nondominated_sort(const std::vector<Objectives>& points);

/// Crowding distance of each member of one front (same order as input).
std::vector<double> crowding_distance(const std::vector<Objectives>& front);

/// Area dominated by `points` and bounded below by `reference`.
double hypervolume(const std::vector<Objectives>& points, const Objectives& reference = Objectives::Zero());

struct Individual {
  Eigen::VectorXd genes;
  Objectives objectives = Objectives::Zero();
  int rank = 0;
  double crowding = 0.0;
};

struct Nsga2Problem {
  int num_genes = 0;
  /// Maps raw genes in [0,1] to the genes actually evaluated.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> repair;
  std::function<Objectives(const Eigen::VectorXd&)> evaluate;
};

struct Nsga2Config {
  int population = 100;
  int generations = 200;
  double crossover_probability = 0.9;
  double crossover_eta = 15.0;
  double mutation_probability = -1.0;  ///< <= 0 selects 1 / num_genes
  double mutation_eta = 20.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct GenerationStats {
  int generation = 0;
  double hypervolume = 0.0;  ///< of the population's first front, reference at the origin
  double best_f1 = 0.0;
  double best_f2 = 0.0;
  int front_size = 0;
};

struct ParetoFront {
  std::vector<Individual> members;  ///< first front of the final population, sorted by f1
  std::vector<GenerationStats> history;  ///< entry 0 is the initial population
  int generations = 0;
  long evaluations = 0;
  std::uint64_t seed = 0;
};

/// Thrown when the problem's evaluate() fails; carries the offending genes.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, Eigen::VectorXd genes)
      : std::runtime_error(what), genes_(std::move(genes)) {}
  const Eigen::VectorXd& genes() const { return genes_; }

 private:
  Eigen::VectorXd genes_;
};

ParetoFront evolve_nsga2(const Nsga2Problem& problem, const Nsga2Config& config);

}  // namespace nafd
