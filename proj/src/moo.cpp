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

#include "nafd/moo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "nafd/parallel.hpp"
#include "nafd/rng.hpp"

namespace nafd {

Eigen::VectorXd repair_genes(const Eigen::VectorXd& genes, int m_dl, int k_dl) {
  const int per = genes_per_rru(k_dl);
  if (genes.size() != m_dl * per) throw std::invalid_argument("repair_genes: expected M_dl * (K_dl + 1) genes");
  Eigen::VectorXd out = genes.cwiseMax(0.0).cwiseMin(1.0);
  for (int m = 0; m < m_dl; ++m) {
    auto block = out.segment(m * per, per);
    const double load = block.sum();
    if (load > 1.0) block /= load;
  }
  return out;
}

PowerAllocation decode_genes(const Eigen::VectorXd& genes, const BeamSet& beams, double p_max,
                             const Eigen::VectorXd& p_ul) {
  const int m_dl = beams.m_dl(), k_dl = beams.k_dl();
  if (genes.size() != m_dl * genes_per_rru(k_dl)) throw std::invalid_argument("decode_genes: gene count mismatch");
  PowerAllocation a;
  a.p_max = p_max;
  a.p_ul = p_ul;
  a.alpha.resize(m_dl, k_dl);
  a.beta.resize(m_dl);
  auto factor = [](double gene, double norm2) { return norm2 > 0.0 ? gene / norm2 : 0.0; };
  for (int m = 0; m < m_dl; ++m) {
    for (int i = 0; i < k_dl; ++i) a.alpha(m, i) = factor(genes(data_gene(m, i, k_dl)), beams.data_norm2(m, i));
    a.beta(m) = factor(genes(pilot_gene(m, k_dl)), beams.sensing_norm2(m));
  }
  return a;
}

Eigen::VectorXd encode_genes(const PowerAllocation& alloc, const BeamSet& beams) {
  const int m_dl = beams.m_dl(), k_dl = beams.k_dl();
  Eigen::VectorXd genes(m_dl * genes_per_rru(k_dl));
  for (int m = 0; m < m_dl; ++m) {
    for (int i = 0; i < k_dl; ++i) genes(data_gene(m, i, k_dl)) = alloc.alpha(m, i) * beams.data_norm2(m, i);
    genes(pilot_gene(m, k_dl)) = alloc.beta(m) * beams.sensing_norm2(m);
  }
  return genes;
}

PowerAllocation repair_to_constraint(const Eigen::VectorXd& genes, const BeamSet& beams, double p_max,
                                     const Eigen::VectorXd& p_ul) {
  return decode_genes(repair_genes(genes, beams.m_dl(), beams.k_dl()), beams, p_max, p_ul);
}

std::vector<std::vector<int>> fast_nondominated_sort(const std::vector<Objectives>& points) {
  const int n = static_cast<int>(points.size());
  std::vector<std::vector<int>> dominated(n);
  std::vector<int> domination_count(n, 0);
  std::vector<std::vector<int>> fronts(1);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(points[p], points[q]))
        dominated[p].push_back(q);
      else if (dominates(points[q], points[p]))
        ++domination_count[p];
    }
    if (domination_count[p] == 0) fronts[0].push_back(p);
  }
  for (std::size_t f = 0; !fronts[f].empty(); ++f) {
    std::vector<int> next;
    for (int p : fronts[f])
      for (int q : dominated[p])
        if (--domination_count[q] == 0) next.push_back(q);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

std::vector<double> crowding_distance(const std::vector<Objectives>& front) {
  const std::size_t n = front.size();
  std::vector<double> distance(n, 0.0);
  if (n == 0) return distance;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (n <= 2) return std::vector<double>(n, kInf);
  std::vector<int> order(n);
  for (int obj = 0; obj < 2; ++obj) {
    std::iota(order.begin(), order.end(), 0);
    // Ties broken on the other objective so the result is order-invariant.
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (front[a](obj) != front[b](obj)) return front[a](obj) < front[b](obj);
      return front[a](1 - obj) < front[b](1 - obj);
    });
    const double lo = front[order.front()](obj), hi = front[order.back()](obj);
    distance[order.front()] = kInf;
    distance[order.back()] = kInf;
    if (!(hi > lo)) continue;
    for (std::size_t k = 1; k + 1 < n; ++k)
      distance[order[k]] += (front[order[k + 1]](obj) - front[order[k - 1]](obj)) / (hi - lo);
  }
  return distance;
}

double hypervolume(const std::vector<Objectives>& points, const Objectives& reference) {
  std::vector<Objectives> sorted;
  for (const auto& p : points)
    if ((p.array() > reference.array()).all()) sorted.push_back(p);
  std::sort(sorted.begin(), sorted.end(), [](const Objectives& a, const Objectives& b) { return a(0) > b(0); });
  double volume = 0.0, ceiling = reference(1);
  for (const auto& p : sorted) {
    if (p(1) > ceiling) {
      volume += (p(0) - reference(0)) * (p(1) - ceiling);
      ceiling = p(1);
    }
  }
  return volume;
}

namespace {

struct Variation {
  const Nsga2Config& cfg;
  double mutation_probability;
  Rng& rng;
  std::uniform_real_distribution<double> unit{0.0, 1.0};

  double u() { return unit(rng); }

  // Simulated binary crossover on [0, 1], bounded form.
  void crossover(Eigen::VectorXd& c1, Eigen::VectorXd& c2) {
    if (u() > cfg.crossover_probability) return;
    const double eta = cfg.crossover_eta;
    for (Eigen::Index i = 0; i < c1.size(); ++i) {
      if (u() > 0.5) continue;
      double y1 = c1(i), y2 = c2(i);
      if (std::abs(y1 - y2) <= 1e-14) continue;
      if (y1 > y2) std::swap(y1, y2);
      const double r = u();
      auto spread = [&](double beta) {
        const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
        return r <= 1.0 / alpha ? std::pow(r * alpha, 1.0 / (eta + 1.0))
                                : std::pow(1.0 / (2.0 - r * alpha), 1.0 / (eta + 1.0));
      };
      const double betaq1 = spread(1.0 + 2.0 * y1 / (y2 - y1));
      const double betaq2 = spread(1.0 + 2.0 * (1.0 - y2) / (y2 - y1));
      double a = std::clamp(0.5 * ((y1 + y2) - betaq1 * (y2 - y1)), 0.0, 1.0);
      double b = std::clamp(0.5 * ((y1 + y2) + betaq2 * (y2 - y1)), 0.0, 1.0);
      if (u() <= 0.5) std::swap(a, b);
      c1(i) = a;
      c2(i) = b;
    }
  }

  // Polynomial mutation on [0, 1], bounded form.
  void mutate(Eigen::VectorXd& c) {
    const double eta = cfg.mutation_eta;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (u() > mutation_probability) continue;
      const double y = c(i);
      const double r = u();
      const double power = 1.0 / (eta + 1.0);
      double dq;
      if (r < 0.5) {
        const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - y, eta + 1.0);
        dq = std::pow(val, power) - 1.0;
      } else {
        const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(y, eta + 1.0);
        dq = 1.0 - std::pow(val, power);
      }
      c(i) = std::clamp(y + dq, 0.0, 1.0);
    }
  }
};

void evaluate_all(const Nsga2Problem& problem, std::vector<Individual>& pop, std::size_t begin, unsigned threads) {
  parallel_for(pop.size() - begin, threads, [&](std::size_t j) {
    Individual& ind = pop[begin + j];
    if (problem.repair) ind.genes = problem.repair(ind.genes);
    try {
      ind.objectives = problem.evaluate(ind.genes);
    } catch (const std::exception& e) {
      throw EvaluationError(std::string("objective evaluation failed: ") + e.what(), ind.genes);
    }
    if (!ind.objectives.allFinite()) throw EvaluationError("objective evaluation returned a non-finite value", ind.genes);
  });
}

// Assigns rank and crowding to every member; returns the fronts.
std::vector<std::vector<int>> rank_population(std::vector<Individual>& pop) {
  std::vector<Objectives> objs;
  objs.reserve(pop.size());
  for (const auto& ind : pop) objs.push_back(ind.objectives);
  auto fronts = fast_nondominated_sort(objs);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    std::vector<Objectives> front_objs;
    for (int i : fronts[f]) front_objs.push_back(objs[i]);
    const auto crowd = crowding_distance(front_objs);
    for (std::size_t k = 0; k < fronts[f].size(); ++k) {
      pop[fronts[f][k]].rank = static_cast<int>(f);
      pop[fronts[f][k]].crowding = crowd[k];
    }
  }
  return fronts;
}

bool better(const Individual& a, const Individual& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.crowding > b.crowding;
}

GenerationStats stats_of(const std::vector<Individual>& pop, int generation) {
  GenerationStats s;
  s.generation = generation;
  std::vector<Objectives> first;
  s.best_f1 = -std::numeric_limits<double>::infinity();
  s.best_f2 = -std::numeric_limits<double>::infinity();
  for (const auto& ind : pop) {
    if (ind.rank == 0) first.push_back(ind.objectives);
    s.best_f1 = std::max(s.best_f1, ind.objectives(0));
    s.best_f2 = std::max(s.best_f2, ind.objectives(1));
  }
  s.front_size = static_cast<int>(first.size());
  s.hypervolume = hypervolume(first);
  return s;
}

}  // namespace

ParetoFront evolve_nsga2(const Nsga2Problem& problem, const Nsga2Config& cfg) {
  if (cfg.population < 4 || cfg.population % 2 != 0)
    throw std::invalid_argument("NSGA-II population must be even and >= 4");
  if (cfg.generations < 0) throw std::invalid_argument("NSGA-II generations must be >= 0");
  if (problem.num_genes < 1 || !problem.evaluate) throw std::invalid_argument("NSGA-II problem is incomplete");

  Rng rng(derive_seed(cfg.seed, {0x6e736761ULL}));
  Variation variation{cfg, cfg.mutation_probability > 0.0 ? cfg.mutation_probability : 1.0 / problem.num_genes, rng};
  const std::size_t n = static_cast<std::size_t>(cfg.population);

  ParetoFront result;
  result.seed = cfg.seed;
  std::vector<Individual> pop(n);
  for (auto& ind : pop) {
    ind.genes.resize(problem.num_genes);
    for (int g = 0; g < problem.num_genes; ++g) ind.genes(g) = variation.u();
  }
  evaluate_all(problem, pop, 0, cfg.threads);
  result.evaluations += static_cast<long>(n);
  rank_population(pop);
  result.history.push_back(stats_of(pop, 0));

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  auto tournament = [&]() -> const Individual& {
    const Individual& a = pop[pick(rng)];
    const Individual& b = pop[pick(rng)];
    return better(b, a) ? b : a;
  };

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    std::vector<Individual> combined = pop;
    combined.reserve(2 * n);
    while (combined.size() < 2 * n) {
      Individual c1 = tournament(), c2 = tournament();
      variation.crossover(c1.genes, c2.genes);
      variation.mutate(c1.genes);
      variation.mutate(c2.genes);
      combined.push_back(std::move(c1));
      combined.push_back(std::move(c2));
    }
    evaluate_all(problem, combined, n, cfg.threads);
    result.evaluations += static_cast<long>(n);

    const auto fronts = rank_population(combined);
    std::vector<Individual> next;
    next.reserve(n);
    for (const auto& front : fronts) {
      if (next.size() + front.size() <= n) {
        for (int i : front) next.push_back(combined[i]);
        continue;
      }
      std::vector<int> order = front;
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return combined[a].crowding > combined[b].crowding; });
      for (std::size_t k = 0; next.size() < n; ++k) next.push_back(combined[order[k]]);
      break;
    }
    pop = std::move(next);
    rank_population(pop);
    result.history.push_back(stats_of(pop, gen));
  }
  result.generations = cfg.generations;

  for (const auto& ind : pop) {
    if (ind.rank != 0) continue;
    const bool duplicate = std::any_of(result.members.begin(), result.members.end(),
                                       [&](const Individual& m) { return m.genes == ind.genes; });
    if (!duplicate) result.members.push_back(ind);
  }
  std::sort(result.members.begin(), result.members.end(),
            [](const Individual& a, const Individual& b) { return a.objectives(0) < b.objectives(0); });
  return result;
}

}  // namespace nafd
