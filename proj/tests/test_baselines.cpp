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
#include <limits>
#include <string>
#include <vector>

#include "afetm/baselines.hpp"
#include "afetm/injector.hpp"
#include "afetm/progmodel.hpp"
#include "test_util.hpp"

using namespace afetm;
using testutil::tree;

namespace {

using LabelledTrees = std::vector<std::pair<std::string, std::vector<CallTree>>>;

}  // namespace

TEST_CASE("gaussian influence values") {
  CHECK(gaussian_influence(0.0, 2.5) == 1.0);
  CHECK(std::abs(gaussian_influence(2.5, 2.5) - std::exp(-0.5)) < 1e-12);
  CHECK(std::abs(gaussian_influence(5.0, 2.5) - std::exp(-2.0)) < 1e-12);
  CHECK_THROWS_AS(gaussian_influence(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(gaussian_influence(1.0, -1.0), ValidationError);
  double last = 1.0;
  for (int d = 1; d < 20; ++d) {
    const double g = gaussian_influence(static_cast<double>(d), 3.0);
    CHECK(g < last);
    CHECK(g > 0.0);
    last = g;
  }
  CHECK(gaussian_influence(tree("A(B)"), tree("A(B)"), 1.0) == 1.0);
  CHECK(gaussian_influence(tree("A(B)"), tree("A"), 1.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("sigma from pairwise distances") {
  // Distances: d(A, A(B)) = 1, d(A, A(B C)) = 2, d(A(B), A(B C)) = 1.
  const auto index = build_gaussian_index(
      LabelledTrees{{"normal", {tree("A")}}, {"x:crash", {tree("A(B)"), tree("A(B C)")}}});
  const double mean = 4.0 / 3.0;
  const double var = ((1 - mean) * (1 - mean) * 2 + (2 - mean) * (2 - mean)) / 3.0;
  CHECK(index.sigma == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  CHECK(index.pairs_used == 3);
  CHECK(index.tree_count() == 3);

  const auto flat = build_gaussian_index(LabelledTrees{{"normal", {tree("A")}}, {"x:crash", {tree("A")}}});
  CHECK(flat.sigma_degenerate);
  CHECK(flat.sigma == 1.0);

  GaussianIndexOptions opt;
  opt.max_pairs = 2;
  const auto sampled = build_gaussian_index(
      LabelledTrees{{"normal", {tree("A"), tree("B"), tree("C")}}, {"x:crash", {tree("D")}}}, opt);
  CHECK(sampled.pairs_used == 2);
}

TEST_CASE("gdc diagnosis") {
  const auto index = build_gaussian_index(LabelledTrees{
      {"normal", {tree("main(A(B) C)")}},
      {"A:crash", {tree("main(A)")}},
      {"C:deadlock", {tree("main(A(B) C(D))")}},
  });
  const auto hit = afct_gdc_diagnose(tree("main(A)"), index);
  CHECK(hit.ranked.front().first == "A:crash");
  CHECK(hit.ranked.front().second == 1.0);
  CHECK(hit.error_detected);
  CHECK(hit.located == std::optional<FunctionId>("A"));

  const auto normal = afct_gdc_diagnose(tree("main(A(B) C)"), index);
  CHECK_FALSE(normal.error_detected);
  CHECK_FALSE(normal.located.has_value());

  CHECK_THROWS_AS(afct_gdc_diagnose(tree("main"), GaussianIndex{}), ValidationError);
}

TEST_CASE("gdc ties break by label") {
  const auto index = build_gaussian_index(LabelledTrees{
      {"normal", {tree("main(A B C)")}},
      {"y:crash", {tree("main(X)")}},
      {"x:crash", {tree("main(Y)")}},
  });
  // Equidistant from both fault trees, far from normal.
  const auto d = afct_gdc_diagnose(tree("main(Z)"), index);
  CHECK(d.ranked[0].second == d.ranked[1].second);
  CHECK(d.ranked[0].first == "x:crash");
  CHECK(d.located == std::optional<FunctionId>("x"));
}

TEST_CASE("gdc index from an FDDB masks untraced functions") {
  Fddb db;
  db.normal = {tree("main(A(B) C)")};
  FddbRecord r;
  r.fault.kind = FaultKind::kCrash;
  r.fault.target = "A";
  r.label = r.fault.label();
  r.fcts = {tree("main(A)")};
  db.records = {r};
  TracePlan plan;
  plan.traced = {"main", "A"};
  const auto index = build_gaussian_index(db, plan);
  REQUIRE(index.db.size() == 2);
  CHECK(index.db[0].first == "normal");
  CHECK(shape_key(index.db[0].second[0]) == shape_key(tree("main(A)")));
}

TEST_CASE("edc detection and location") {
  const std::vector<CallTree> normal{tree("main(A(B) C)"), tree("main(D)")};
  const auto same = fct_edc_detect(tree("main(D)"), normal, 0.0);
  CHECK_FALSE(same.error);
  CHECK(same.distance == 0);

  // main(A) is one relabel away from main(D).
  CHECK(fct_edc_detect(tree("main(A)"), normal, 0.0).distance == 1);
  const auto far = fct_edc_detect(tree("main(A(X))"), std::vector<CallTree>{normal[0]}, 1.5);
  CHECK(far.error);
  // First divergence names the function the normal tree expected there.
  CHECK(far.located == std::optional<FunctionId>("B"));

  // Truncation right after A drops B and C: two nodes gone.
  const auto missing = fct_edc_detect(tree("main(A)"), std::vector<CallTree>{normal[0]}, 1.0);
  CHECK(missing.error);
  CHECK(missing.located == std::optional<FunctionId>("B"));
  CHECK_FALSE(fct_edc_detect(tree("main(A)"), std::vector<CallTree>{normal[0]}, 2.0).error);

  CHECK_FALSE(fct_edc_detect(tree("Q(R S)"), normal, std::numeric_limits<double>::infinity()).error);
  CHECK_THROWS_AS(fct_edc_detect(tree("main"), std::vector<CallTree>{}, 0.0), ValidationError);
  CHECK_THROWS_AS(fct_edc_detect(tree("main"), normal, -1.0), ValidationError);
}

TEST_CASE("edc with threshold zero flags everything outside the normal set") {
  const auto model = random_program(3);
  const auto& req = model.request_types().front();
  std::vector<CallTree> normal;
  for (std::uint64_t s = 0; s < 5; ++s) normal.push_back(execute_request(model, req, s).fct);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto t = execute_request(model, req, s + 100).fct;
    bool member = false;
    for (const auto& n : normal) member = member || n == t;
    CHECK(fct_edc_detect(t, normal, 0.0).error == !member);
  }
}

TEST_CASE("log oracle") {
  LogModel logs;
  logs.loggers = {"log_warn"};
  const auto hit = log_oracle_diagnose(tree("main(F(x y) log_warn)"), "F", logs);
  CHECK(hit.detected);
  CHECK(hit.logger == std::optional<FunctionId>("log_warn"));
  CHECK(hit.fld == std::optional<std::size_t>(3));

  const auto crash = log_oracle_diagnose(tree("main(F)"), "F", logs);
  CHECK_FALSE(crash.detected);
  CHECK_FALSE(crash.fld.has_value());

  // A logger before the fault site does not count.
  CHECK_FALSE(log_oracle_diagnose(tree("main(log_warn F)"), "F", logs).detected);
  CHECK_FALSE(log_oracle_diagnose(tree("main(G)"), "F", logs).detected);
}

TEST_CASE("webshop loggers") {
  const auto model = load_program_spec(testutil::webshop_path());
  const auto logs = derive_log_model(model);
  CHECK(logs.loggers == FunctionSet{"log_resource", "log_warn"});
}
