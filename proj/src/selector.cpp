// Copyright 2026 The AFETM Authors
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

#include "afetm/selector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace afetm {
namespace {

// Budget comparisons tolerate the rounding of summing weights in a
// different order than the budget was computed.
bool within_budget(double total, double w_ub) {
  return total <= w_ub + 1e-12 * std::max(1.0, std::abs(w_ub));
}

void check_dimension(const CoverageInstance& instance,
                     std::span<const std::uint8_t> x) {
  if (x.size() != instance.m()) {
    throw ValidationError("selection has " + std::to_string(x.size()) +
                          " entries, instance has " +
                          std::to_string(instance.m()) + " functions");
  }
}

double total_weight(const CoverageInstance& instance,
                    std::span<const std::uint8_t> x) {
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j]) total += instance.w[j];
  }
  return total;
}

}  // namespace

bool CoverageInstance::h(std::size_t i, std::size_t j) const {
  const auto& c = covers.at(j);
  return std::binary_search(c.begin(), c.end(), i);
}

void CoverageInstance::validate() const {
  if (covers.size() != ids.size() || w.size() != ids.size()) {
    throw ValidationError("coverage instance: ids, covers and weights differ "
                          "in length");
  }
  for (std::size_t j = 0; j < covers.size(); ++j) {
    for (std::size_t i : covers[j]) {
      if (i >= n) {
        throw ValidationError("coverage instance: function '" + ids[j] +
                              "' covers block " + std::to_string(i) +
                              " but there are only " + std::to_string(n));
      }
    }
    if (!(w[j] >= 0.0) || !std::isfinite(w[j])) {
      throw ValidationError("coverage instance: weight of '" + ids[j] +
                            "' must be non-negative");
    }
  }
  if (!(w_ub >= 0.0) || !std::isfinite(w_ub)) {
    throw ValidationError("coverage instance: w_ub must be non-negative");
  }
}

CoverageCounts coverage_counts(const CoverageInstance& instance,
                               std::span<const std::uint8_t> x) {
  check_dimension(instance, x);
  CoverageCounts out;
  out.c.assign(instance.n, 0);
  out.a.assign(instance.n, 0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!x[j]) continue;
    for (std::size_t i : instance.covers[j]) ++out.c[i];
  }
  for (std::size_t i = 0; i < instance.n; ++i) out.a[i] = out.c[i] >= 1 ? 1 : 0;
  return out;
}

namespace {

double fitness_of(const CoverageInstance& instance, std::size_t covered,
                  double weight) {
  if (!(instance.w_ub > 0.0)) {
    throw ValidationError("fitness is undefined for w_ub = 0");
  }
  const auto n = static_cast<double>(instance.n);
  const double delta1 = n / (n + 1.0);
  const double delta2 = 1.0 / (n + 1.0);
  const double uncovered =
      instance.n == 0 ? 0.0 : 1.0 - static_cast<double>(covered) / n;
  return delta1 * uncovered + delta2 * weight / instance.w_ub;
}

}  // namespace

double fitness(const CoverageInstance& instance,
               std::span<const std::uint8_t> x) {
  const auto counts = coverage_counts(instance, x);
  const auto covered = static_cast<std::size_t>(
      std::count(counts.a.begin(), counts.a.end(), 1));
  return fitness_of(instance, covered, total_weight(instance, x));
}

FunctionSet SelectionSolution::selected(const CoverageInstance& instance) const {
  FunctionSet out;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j]) out.insert(instance.ids[j]);
  }
  return out;
}

SelectionSolution evaluate_selection(const CoverageInstance& instance,
                                     Selection x) {
  SelectionSolution s;
  const auto counts = coverage_counts(instance, x);
  const auto covered = static_cast<std::size_t>(
      std::count(counts.a.begin(), counts.a.end(), 1));
  s.total_weight = total_weight(instance, x);
  s.fitness = fitness_of(instance, covered, s.total_weight);
  s.coverage_fraction = instance.n == 0
                            ? 1.0
                            : static_cast<double>(covered) /
                                  static_cast<double>(instance.n);
  s.x = std::move(x);
  return s;
}

// --- MMAS ---------------------------------------------------------------------

void MmasParams::validate() const {
  if (n_ant < 1 || n_run < 1) {
    throw ValidationError("mmas: n_ant and n_run must be positive");
  }
  if (!(rho > 0.0 && rho < 1.0)) throw ValidationError("mmas: rho must be in (0,1)");
  if (!(tau_ini > 0.0)) throw ValidationError("mmas: tau_ini must be positive");
  if (!(l > 1.0)) throw ValidationError("mmas: l must be greater than 1");
  if (!(q > 0.0)) throw ValidationError("mmas: Q must be positive");
  if (!(eta_max > 1.0)) throw ValidationError("mmas: eta_max must be greater than 1");
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ValidationError("mmas: alpha and beta must be finite");
  }
}

MmasState MmasState::initial(const CoverageInstance& instance,
                             const MmasParams& params) {
  MmasState s;
  s.tau.assign(instance.m(), params.tau_ini);
  s.allowed.assign(static_cast<std::size_t>(params.n_ant),
                   Selection(instance.m(), 1));
  s.x_best.assign(instance.m(), 0);
  s.x_ib.assign(instance.m(), 0);
  return s;
}

std::vector<double> transition_probabilities(
    std::span<const double> tau, std::span<const std::uint8_t> allowed,
    const MmasParams& params, const CoverageInstance& instance) {
  check_dimension(instance, allowed);
  std::vector<double> p(instance.m(), 0.0);
  double total = 0.0;
  bool any = false;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!allowed[j]) continue;
    any = true;
    const double eta = instance.w[j] != 0.0 ? 1.0 / instance.w[j] : params.eta_max;
    p[j] = std::pow(tau[j], params.alpha) * std::pow(eta, params.beta);
    total += p[j];
  }
  if (!any) throw ValidationError("transition probabilities: no function allowed");
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> transition_probabilities(const MmasState& state,
                                             const MmasParams& params,
                                             const CoverageInstance& instance,
                                             std::size_t ant) {
  return transition_probabilities(state.tau, state.allowed.at(ant), params,
                                  instance);
}

void pheromone_update(std::vector<double>& tau, const MmasParams& params,
                      const CoverageInstance& instance,
                      std::span<const std::uint8_t> x_best) {
  const double f_best = fitness(instance, x_best);
  const double tau_max = params.tau_max();
  const double tau_min = params.tau_min();
  for (std::size_t j = 0; j < tau.size(); ++j) {
    double next = (1.0 - params.rho) * tau[j];
    if (x_best[j]) {
      if (f_best == 0.0) {
        next = tau_max;  // unbounded deposit
      } else {
        next += params.q / (params.n_ant * f_best * tau[j]);
      }
    }
    tau[j] = std::clamp(next, tau_min, tau_max);
  }
}

Selection construct_solution(std::span<const double> tau,
                             const MmasParams& params,
                             const CoverageInstance& instance, Rng& rng) {
  Selection allowed(instance.m(), 1);
  std::size_t remaining = instance.m();
  double w_total = 0.0;
  while (w_total < instance.w_ub && remaining > 0) {
    const auto p = transition_probabilities(tau, allowed, params, instance);
    const double u = uniform01(rng);
    double cumulative = 0.0;
    std::size_t chosen = instance.m();
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (!allowed[j]) continue;
      chosen = j;
      cumulative += p[j];
      if (u < cumulative) break;
    }
    w_total += instance.w[chosen];
    if (within_budget(w_total, instance.w_ub)) {
      allowed[chosen] = 0;
      --remaining;
    }
  }
  Selection x(instance.m());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = allowed[j] ? 0 : 1;
  return x;
}

Selection prune_redundant(const CoverageInstance& instance, Selection x) {
  auto counts = coverage_counts(instance, x).c;
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j]) order.push_back(j);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return instance.w[a] > instance.w[b];
  });
  for (std::size_t j : order) {
    const auto& blocks = instance.covers[j];
    const bool redundant = std::all_of(blocks.begin(), blocks.end(),
                                       [&](std::size_t i) { return counts[i] >= 2; });
    if (!redundant) continue;
    x[j] = 0;
    for (std::size_t i : blocks) --counts[i];
  }
  return x;
}

SelectionSolution mmas_select(const CoverageInstance& instance,
                              const MmasParams& params, MmasTrace* trace) {
  instance.validate();
  params.validate();
  const std::size_t m = instance.m();
  std::vector<double> tau(m, params.tau_ini);
  Selection x_best(m, 0);
  double f_best = fitness(instance, x_best);
  const auto n_ant = static_cast<std::size_t>(params.n_ant);
  std::vector<Selection> ants(n_ant);
  std::vector<double> ant_fitness(n_ant);

  for (int t = 0; t < params.n_run; ++t) {
    parallel_for(n_ant, params.jobs, [&](std::size_t h) {
      Rng rng(substream(params.seed, {static_cast<std::uint64_t>(t), h}));
      Selection x = construct_solution(tau, params, instance, rng);
      if (params.prune_redundant) x = prune_redundant(instance, std::move(x));
      ant_fitness[h] = fitness(instance, x);
      ants[h] = std::move(x);
    });
    Selection x_ib(m, 0);
    double f_ib = fitness(instance, x_ib);
    for (std::size_t h = 0; h < n_ant; ++h) {
      if (ant_fitness[h] < f_ib) {
        f_ib = ant_fitness[h];
        x_ib = ants[h];
      }
    }
    pheromone_update(tau, params, instance, x_best);
    if (trace != nullptr) {
      for (double v : tau) {
        if (v < params.tau_min() || v > params.tau_max()) trace->bounds_held = false;
      }
    }
    if (f_ib < f_best) {
      f_best = f_ib;
      x_best = std::move(x_ib);
    }
    if (trace != nullptr) trace->best_fitness.push_back(f_best);
  }
  return evaluate_selection(instance, std::move(x_best));
}

SelectionSolution brute_force_select(const CoverageInstance& instance) {
  instance.validate();
  const std::size_t m = instance.m();
  if (m > kBruteForceLimit) {
    throw ValidationError("brute force: " + std::to_string(m) +
                          " functions exceed the limit of " +
                          std::to_string(kBruteForceLimit));
  }
  const std::size_t words = (instance.n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> masks(m, std::vector<std::uint64_t>(words, 0));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i : instance.covers[j]) masks[j][i / 64] |= 1ULL << (i % 64);
  }

  Selection best(m, 0);
  double best_f = fitness(instance, best);
  double best_w = 0.0;
  std::vector<std::uint64_t> cover(words);
  Selection x(m);
  for (std::uint64_t mask = 1; mask < (1ULL << m); ++mask) {
    double weight = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask >> j & 1) weight += instance.w[j];
    }
    if (!within_budget(weight, instance.w_ub)) continue;
    std::fill(cover.begin(), cover.end(), 0);
    for (std::size_t j = 0; j < m; ++j) {
      if (!(mask >> j & 1)) continue;
      for (std::size_t k = 0; k < words; ++k) cover[k] |= masks[j][k];
    }
    std::size_t covered = 0;
    for (std::uint64_t word : cover) covered += static_cast<std::size_t>(std::popcount(word));
    const double f = fitness_of(instance, covered, weight);
    for (std::size_t j = 0; j < m; ++j) x[j] = mask >> j & 1;
    constexpr double kTie = 1e-12;
    bool better = f < best_f - kTie;
    if (!better && std::abs(f - best_f) <= kTie) {
      better = weight < best_w - kTie ||
               (std::abs(weight - best_w) <= kTie && x < best);
    }
    if (better) {
      best = x;
      best_f = f;
      best_w = weight;
    }
  }
  return evaluate_selection(instance, std::move(best));
}

CoverageInstance build_coverage_instance(const ProgramModel& model,
                                         const WeightVector& weights,
                                         double budget_fraction) {
  if (weights.size() != model.function_count()) {
    throw ValidationError("weights have " + std::to_string(weights.size()) +
                          " entries, model has " +
                          std::to_string(model.function_count()) + " functions");
  }
  if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) {
    throw ValidationError("budget fraction P must be in (0, 1]");
  }
  CoverageInstance inst;
  inst.covers.resize(model.function_count());
  for (std::size_t f = 0; f < model.function_count(); ++f) {
    inst.ids.push_back(model.function(f).id);
    for (std::size_t b = 0; b < model.function(f).blocks.size(); ++b) {
      for (std::size_t callee : model.callees(f, b)) {
        inst.covers[callee].push_back(inst.n);
      }
      ++inst.n;
    }
  }
  for (auto& c : inst.covers) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  inst.w = weights;
  inst.w_ub = budget_fraction * std::accumulate(weights.begin(), weights.end(), 0.0);
  inst.validate();
  return inst;
}

}  // namespace afetm
