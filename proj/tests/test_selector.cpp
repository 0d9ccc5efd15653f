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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "afetm/progmodel.hpp"
#include "afetm/selector.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace afetm;

TEST_CASE("coverage counts on the three-function instance") {
  const auto s1 = testutil::s1(6.0);
  const auto zero = coverage_counts(s1, Selection{0, 0, 0});
  CHECK(zero.c == std::vector<int>{0, 0, 0, 0});
  CHECK(zero.a == std::vector<std::uint8_t>{0, 0, 0, 0});

  const auto partial = coverage_counts(s1, Selection{1, 0, 1});
  CHECK(partial.c == std::vector<int>{1, 1, 0, 1});
  CHECK(partial.a == std::vector<std::uint8_t>{1, 1, 0, 1});

  const auto full = coverage_counts(s1, Selection{1, 1, 1});
  CHECK(full.c == std::vector<int>{1, 2, 1, 1});
  CHECK(full.a == std::vector<std::uint8_t>{1, 1, 1, 1});
}

TEST_CASE("fitness values") {
  CHECK(fitness(testutil::s1(6.0), Selection{1, 1, 1}) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(fitness(testutil::s1(3.0), Selection{1, 0, 1}) == doctest::Approx(0.4).epsilon(1e-12));
  // Nothing selected leaves only the coverage term n/(n+1).
  CHECK(fitness(testutil::s1(6.0), Selection{0, 0, 0}) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_THROWS_AS(fitness(testutil::s1(0.0), Selection{1, 0, 0}), ValidationError);
}

TEST_CASE("fitness agrees with the oracle on random subsets") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = testutil::random_instance(rng, 8, 6, 0.6);
    std::vector<int> xi(inst.m());
    Selection x(inst.m());
    for (std::size_t j = 0; j < inst.m(); ++j) {
      xi[j] = static_cast<int>(rng() & 1U);
      x[j] = static_cast<std::uint8_t>(xi[j]);
    }
    CHECK(fitness(inst, x) == doctest::Approx(oracle::fitness(inst, xi)).epsilon(1e-12));
  }
}

TEST_CASE("transition probabilities") {
  auto inst = testutil::s1(6.0);
  MmasParams p;
  p.alpha = 1.0;
  p.beta = 1.0;

  SUBCASE("equal pheromone and weights are uniform") {
    CoverageInstance eq = inst;
    eq.w = {2.0, 2.0, 2.0};
    const auto probs = transition_probabilities(std::vector<double>{1, 1, 1}, Selection{1, 1, 1}, p, eq);
    for (double v : probs) CHECK(v == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("disallowed functions get zero") {
    const auto probs = transition_probabilities(std::vector<double>{1, 1, 1}, Selection{1, 0, 1}, p, inst);
    CHECK(probs[1] == 0.0);
  }
  SUBCASE("two functions weighted 1 and 2") {
    CoverageInstance two;
    two.n = 1;
    two.ids = {"a", "b"};
    two.covers = {{0}, {0}};
    two.w = {1.0, 2.0};
    two.w_ub = 3.0;
    const auto probs = transition_probabilities(std::vector<double>{1, 1}, Selection{1, 1}, p, two);
    CHECK(probs[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("nothing allowed throws") {
    CHECK_THROWS_AS(transition_probabilities(std::vector<double>{1, 1, 1}, Selection{0, 0, 0}, p, inst),
                    ValidationError);
  }
}

TEST_CASE("pheromone update") {
  CoverageInstance one;
  one.n = 1;
  one.ids = {"f"};
  one.covers = {{0}};
  one.w = {1.0};
  one.w_ub = 1.0;  // fitness of x = (1) is 0.5 * 0 + 0.5 * 1
  MmasParams p;
  p.rho = 0.1;
  p.q = 1.0;
  p.n_ant = 1;
  p.tau_ini = 10.0;
  p.l = 100.0;

  std::vector<double> tau{1.0};
  pheromone_update(tau, p, one, Selection{1});
  CHECK(tau[0] == doctest::Approx(2.9).epsilon(1e-12));

  tau = {1.0};
  pheromone_update(tau, p, one, Selection{0});
  CHECK(tau[0] == doctest::Approx(0.9).epsilon(1e-12));

  tau = {0.1};  // decays below tau_min = 0.1
  pheromone_update(tau, p, one, Selection{0});
  CHECK(tau[0] == doctest::Approx(p.tau_min()));
}

TEST_CASE("brute force and MMAS on the three-function instance") {
  const auto full = brute_force_select(testutil::s1(6.0));
  CHECK(full.x == Selection{1, 1, 1});
  CHECK(full.fitness == doctest::Approx(0.2));
  const auto half = brute_force_select(testutil::s1(3.0));
  CHECK(half.x == Selection{1, 0, 1});
  CHECK(half.fitness == doctest::Approx(0.4));

  MmasParams p;
  p.seed = 3;
  CHECK(mmas_select(testutil::s1(6.0), p).fitness == doctest::Approx(0.2));
  CHECK(mmas_select(testutil::s1(3.0), p).fitness == doctest::Approx(0.4));
}

TEST_CASE("degenerate instances") {
  CoverageInstance empty;
  empty.n = 3;
  empty.w_ub = 1.0;
  const auto sol = brute_force_select(empty);
  CHECK(sol.x.empty());
  CHECK(sol.fitness == doctest::Approx(0.75));

  CoverageInstance single;
  single.n = 2;
  single.ids = {"all"};
  single.covers = {{0, 1}};
  single.w = {2.0};
  single.w_ub = 4.0;
  const auto s = brute_force_select(single);
  CHECK(s.x == Selection{1});
  CHECK(s.fitness == doctest::Approx(1.0 / 3.0 * 0.5));
}

TEST_CASE("brute force matches the independent oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = testutil::random_instance(rng, 10, 8, 0.3 + 0.7 * uniform01(rng));
    const auto ours = brute_force_select(inst);
    const auto ref = oracle::best_cover(inst);
    CHECK(ours.fitness == doctest::Approx(ref.fitness).epsilon(1e-12));
  }
}

TEST_CASE("MMAS properties on random instances") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = testutil::random_instance(rng, 10, 8, 0.5);
    MmasParams p;
    p.n_run = 50;
    p.seed = static_cast<std::uint64_t>(trial);
    MmasTrace trace;
    const auto sol = mmas_select(inst, p, &trace);
    CHECK(trace.bounds_held);
    CHECK(sol.total_weight <= inst.w_ub + 1e-9);
    CHECK(sol.fitness >= brute_force_select(inst).fitness - 1e-12);
    // The best-so-far fitness never gets worse.
    for (std::size_t i = 1; i < trace.best_fitness.size(); ++i) {
      CHECK(trace.best_fitness[i] <= trace.best_fitness[i - 1] + 1e-15);
    }
    // Same seed, same answer.
    CHECK(mmas_select(inst, p).x == sol.x);
  }
}

TEST_CASE("pruning keeps coverage and never adds weight") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = testutil::random_instance(rng, 8, 7, 1.0);
    Selection x(inst.m());
    for (auto& v : x) v = static_cast<std::uint8_t>(rng() & 1U);
    const auto pruned = prune_redundant(inst, x);
    const auto before = evaluate_selection(inst, x);
    const auto after = evaluate_selection(inst, pruned);
    CHECK(after.coverage_fraction == doctest::Approx(before.coverage_fraction));
    CHECK(after.total_weight <= before.total_weight + 1e-12);
  }
}

TEST_CASE("a larger budget never lowers optimal coverage") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = testutil::random_instance(rng, 9, 7, 1.0);
    double total = 0.0;
    for (double w : inst.w) total += w;
    double last = -1.0;
    for (double p : {0.1, 0.3, 0.5, 1.0}) {
      inst.w_ub = p * total;
      if (inst.w_ub <= 0.0) continue;
      const auto sol = brute_force_select(inst);
      // Among optima, coverage can only grow with the budget because any
      // smaller-budget solution stays feasible.
      CHECK(sol.coverage_fraction >= last - 1e-12);
      last = sol.coverage_fraction;
    }
  }
}

TEST_CASE("coverage instance from a program model") {
  ProgramSpec spec;
  spec.entry = "main";
  FunctionDef main_fn{"main", {}, 0, 1.0, 0};
  BasicBlock c;
  c.label = 0;
  c.calls = {"fun2"};
  c.successors = {1};
  BasicBlock h;
  h.label = 1;
  h.calls = {"fun2"};
  main_fn.blocks = {c, h};
  FunctionDef fun2{"fun2", {BasicBlock{}}, 0, 1.0, 1};
  FunctionDef idle{"idle", {BasicBlock{}}, 0, 1.0, 1};
  spec.functions = {main_fn, fun2, idle};
  spec.workloads = {WorkloadDef{"w", {{"r", 1.0}}, 1.0}};
  const ProgramModel model(spec);
  const auto inst = build_coverage_instance(model, WeightVector{1.0, 2.0, 0.0}, 1.0);
  CHECK(inst.w_ub == doctest::Approx(3.0));
  CHECK(inst.h(0, 1));
  CHECK(inst.h(1, 1));
  CHECK_FALSE(inst.h(0, 0));
  for (std::size_t i = 0; i < inst.n; ++i) CHECK_FALSE(inst.h(i, 2));
}

TEST_CASE("validation errors") {
  auto inst = testutil::s1(6.0);
  inst.covers[0] = {9};
  CHECK_THROWS_AS(inst.validate(), ValidationError);
  auto neg = testutil::s1(6.0);
  neg.w[1] = -1.0;
  CHECK_THROWS_AS(neg.validate(), ValidationError);
  MmasParams p;
  p.rho = 1.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}
