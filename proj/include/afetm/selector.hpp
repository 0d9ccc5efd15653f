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

// Trace-point selection as minimum weighted set cover with an upper bound on
// total weight, solved by a Max-Min Ant System. An exhaustive solver serves
// as the reference on small instances.

#ifndef AFETM_SELECTOR_HPP_
#define AFETM_SELECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "afetm/common.hpp"
#include "afetm/progmodel.hpp"

namespace afetm {

using Selection = std::vector<std::uint8_t>;  // x_j in {0, 1}

struct CoverageInstance {
  std::size_t n = 0;                            // basic blocks
  std::vector<FunctionId> ids;                  // functions, size m
  std::vector<std::vector<std::size_t>> covers;  // blocks covered by f_j
  WeightVector w;
  double w_ub = 0.0;

  std::size_t m() const { return ids.size(); }
  // h_ij.
  bool h(std::size_t i, std::size_t j) const;
  // Throws ValidationError on mismatched sizes, out-of-range blocks,
  // negative weights or a negative budget.
  void validate() const;
};

struct CoverageCounts {
  std::vector<int> c;           // times each block is covered
  std::vector<std::uint8_t> a;  // covered at least once
};

CoverageCounts coverage_counts(const CoverageInstance& instance,
                               std::span<const std::uint8_t> x);

// Smaller is better. Throws when w_ub is zero.
double fitness(const CoverageInstance& instance,
               std::span<const std::uint8_t> x);

struct SelectionSolution {
  Selection x;
  double fitness = 0.0;
  double coverage_fraction = 0.0;
  double total_weight = 0.0;

  FunctionSet selected(const CoverageInstance& instance) const;
};

SelectionSolution evaluate_selection(const CoverageInstance& instance,
                                     Selection x);

struct MmasParams {
  int n_ant = 20;
  int n_run = 200;
  double alpha = 1.0;
  double beta = 2.0;
  double rho = 0.1;
  double tau_ini = 1.0;
  double l = 50.0;
  double q = 1.0;
  double eta_max = 10.0;
  std::uint64_t seed = 0;
  // Drop functions whose blocks stay covered without them after each ant's
  // construction, most expensive first. Off reproduces the plain listing.
  bool prune_redundant = true;
  unsigned jobs = 1;

  double tau_max() const { return tau_ini; }
  double tau_min() const { return tau_ini / l; }
  void validate() const;
};

struct MmasState {
  std::vector<double> tau;
  std::vector<Selection> allowed;  // per ant
  Selection x_best;
  Selection x_ib;

  static MmasState initial(const CoverageInstance& instance,
                           const MmasParams& params);
};

// Roulette-wheel weights over the allowed functions. Throws when nothing is
// allowed.
std::vector<double> transition_probabilities(
    std::span<const double> tau, std::span<const std::uint8_t> allowed,
    const MmasParams& params, const CoverageInstance& instance);

std::vector<double> transition_probabilities(const MmasState& state,
                                             const MmasParams& params,
                                             const CoverageInstance& instance,
                                             std::size_t ant);

// Evaporation plus the best-solution deposit, then clamping to
// [tau_min, tau_max].
void pheromone_update(std::vector<double>& tau, const MmasParams& params,
                      const CoverageInstance& instance,
                      std::span<const std::uint8_t> x_best);

// One ant's construction; returns x = 1 - allowed.
Selection construct_solution(std::span<const double> tau,
                             const MmasParams& params,
                             const CoverageInstance& instance, Rng& rng);

// Removes functions whose every block is covered by another selected
// function, highest weight first. Coverage is unchanged and weight does not
// increase.
Selection prune_redundant(const CoverageInstance& instance, Selection x);

struct MmasTrace {
  std::vector<double> best_fitness;  // after each iteration
  bool bounds_held = true;           // tau within bounds after every update
};

SelectionSolution mmas_select(const CoverageInstance& instance,
                              const MmasParams& params,
                              MmasTrace* trace = nullptr);

inline constexpr std::size_t kBruteForceLimit = 24;

// Exact optimum by enumeration; ties go to lower weight, then to the
// lexicographically smaller x. Throws when m exceeds kBruteForceLimit.
SelectionSolution brute_force_select(const CoverageInstance& instance);

// Blocks are every block of every function in declaration order; h_ij = 1
// iff block i calls f_j. w_ub = P * sum(w).
CoverageInstance build_coverage_instance(const ProgramModel& model,
                                         const WeightVector& weights,
                                         double budget_fraction);

}  // namespace afetm

#endif  // AFETM_SELECTOR_HPP_
