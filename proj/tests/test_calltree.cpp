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

#include <string>
#include <vector>

#include "afetm/calltree.hpp"
#include "afetm/progmodel.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace afetm;
using testutil::tree;

namespace {

Color color_of(const CallTreeNode& n, const std::string& fn) {
  if (n.function == fn) return n.color;
  for (const auto& c : n.children) {
    const Color k = color_of(c, fn);
    if (k != Color::kNone) return k;
  }
  return Color::kNone;
}

TraceEvent event(std::uint64_t seq, std::string fn, std::optional<std::string> caller,
                 std::optional<std::vector<std::string>> stack = std::nullopt) {
  return TraceEvent{seq, std::move(fn), std::move(caller), std::move(stack)};
}

}  // namespace

TEST_CASE("coloring the worked example") {
  const std::vector<CallTree> fcts{tree("main(A(B(C(D)) E))")};
  const auto res = color_fcts(fcts, FunctionSet{"A", "C", "D"});
  const auto& root = res.colored[0].roots[0];
  CHECK(color_of(root, "main") == Color::kBlue);
  CHECK(color_of(root, "A") == Color::kWhite);
  CHECK(color_of(root, "B") == Color::kBlue);
  CHECK(color_of(root, "C") == Color::kWhite);
  CHECK(color_of(root, "D") == Color::kWhite);
  CHECK(color_of(root, "E") == Color::kRed);
  CHECK(res.callstack == FunctionSet{"A", "C"});

  CHECK(shape_key(mask_red(res.colored[0])) == shape_key(tree("main(A(B(C(D))))")));
}

TEST_CASE("coloring extremes") {
  const std::vector<CallTree> fcts{tree("main(A(B) C)")};
  const auto all = color_fcts(fcts, FunctionSet{"main", "A", "B", "C"});
  CHECK(all.callstack.empty());
  CHECK(mask_red(all.colored[0]).size() == 4);
  const auto none = color_fcts(fcts, FunctionSet{});
  CHECK(none.callstack.empty());
  CHECK(mask_red(none.colored[0]).empty());
}

TEST_CASE("coloring agrees with the definition on random trees") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto model = random_program(seed);
    const auto exec = execute_request(model, model.request_types().front(), seed);
    Rng rng(seed);
    FunctionSet traced;
    for (const auto& f : model.functions()) {
      if (uniform01(rng) < 0.4) traced.insert(f.id);
    }
    const std::vector<CallTree> fcts{exec.fct};
    const auto ours = color_fcts(fcts, traced);
    FunctionSet ref_stack;
    CallTree ref;
    for (const auto& r : exec.fct.roots) ref.roots.push_back(oracle::color_node(r, traced, ref_stack));
    CHECK(canonical_form(ours.colored[0]) == canonical_form(ref));
    CHECK(ours.callstack == ref_stack);
  }
}

TEST_CASE("AFCT from the worked example events") {
  const std::vector<TraceEvent> events{
      event(1, "A", "main", std::vector<std::string>{"main", "A"}),
      event(2, "C", "B", std::vector<std::string>{"main", "A", "B", "C"}),
      event(3, "D", "C"),
  };
  const auto afct = build_afct(events);
  CHECK(shape_key(afct) == shape_key(tree("main(A(B(C(D))))")));
  CHECK(build_afct(std::vector<TraceEvent>{}).empty());
}

TEST_CASE("AFCT under full tracking equals the ground truth") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto model = random_program(seed);
    const auto exec = execute_request(model, model.request_types().front(), seed);
    const auto afct = build_afct(exec.events);
    CHECK(shape_key(afct) == shape_key(collapse_duplicates(exec.fct)));
  }
}

TEST_CASE("AFCT rejects unordered sequence numbers") {
  const std::vector<TraceEvent> events{event(2, "A", std::nullopt), event(1, "B", "A")};
  CHECK_THROWS_AS(build_afct(events), ValidationError);
}

TEST_CASE("tree edit distance examples") {
  CHECK(tree_edit_distance(tree("A(B C)"), tree("A(B C)")) == 0);
  CHECK(tree_edit_distance(tree("A"), tree("B")) == 1);
  CHECK(tree_edit_distance(tree("A(B C)"), tree("A(B)")) == 1);
  CHECK(tree_edit_distance(CallTree{}, tree("A(B)")) == 2);
}

TEST_CASE("tree edit distance matches the edit-script oracle on small trees") {
  const oracle::EditScriptOracle ref(4, "ab");
  const auto& trees = ref.trees();
  std::vector<CallTree> converted;
  for (std::size_t s : trees) converted.push_back(oracle::to_call_tree(ref.state(s)));
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const auto dist = ref.distances_from(trees[i]);
    for (std::size_t j = 0; j < trees.size(); ++j) {
      REQUIRE(tree_edit_distance(converted[i], converted[j]) ==
              static_cast<std::size_t>(dist[trees[j]]));
    }
  }
}

TEST_CASE("tree edit distance is a metric on random trees") {
  std::vector<CallTree> pool;
  // Twelve trees of moderate size keep the cubic triangle check quick.
  for (std::uint64_t seed = 0; pool.size() < 12; ++seed) {
    const auto model = random_program(seed);
    auto fct = execute_request(model, model.request_types().front(), seed).fct;
    if (fct.size() <= 200) pool.push_back(std::move(fct));
  }
  for (const auto& a : pool) {
    CHECK(tree_edit_distance(a, a) == 0);
    for (const auto& b : pool) {
      CHECK(tree_edit_distance(a, b) == tree_edit_distance(b, a));
      CHECK(tree_edit_distance(a, b) <= a.size() + b.size());
      for (const auto& c : pool) {
        CHECK(tree_edit_distance(a, c) <= tree_edit_distance(a, b) + tree_edit_distance(b, c));
      }
    }
  }
}

TEST_CASE("preorder distance") {
  const auto chain = tree("main(A(B(C(D))))");
  CHECK(preorder_distance(chain, "B", "D") == 2);
  CHECK(preorder_distance(chain, "C", "C") == 0);
  CHECK_THROWS_AS(preorder_distance(chain, "Z", "D"), ValidationError);
}

TEST_CASE("canonical form") {
  const auto a = tree("main(A(B) C*)");
  CHECK(canonical_form(a) == canonical_form(tree("main(A(B) C*)")));
  CHECK(canonical_form(a) != canonical_form(tree("main(A(X) C*)")));
  CHECK(canonical_form(a) != canonical_form(tree("main(A(B) C)")));
  CHECK(decode_canonical(canonical_form(a)) == a);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto model = random_program(seed);
    const auto fct = execute_request(model, model.request_types().front(), seed).fct;
    const auto colored = color_fcts(std::vector<CallTree>{fct}, FunctionSet{"f0", "f2"}).colored[0];
    CHECK(decode_canonical(canonical_form(colored)) == colored);
  }
}

TEST_CASE("unordered shape key ignores sibling order only") {
  CHECK(unordered_shape_key(tree("A(B C(D E))")) == unordered_shape_key(tree("A(C(E D) B)")));
  CHECK(shape_key(tree("A(B C)")) != shape_key(tree("A(C B)")));
  CHECK(unordered_shape_key(tree("A(B C)")) != unordered_shape_key(tree("A(B(C))")));
}

TEST_CASE("collapse merges same-function siblings") {
  CHECK(shape_key(collapse_duplicates(tree("A(B(X) C B(Y))"))) == shape_key(tree("A(B(X Y) C)")));
}

TEST_CASE("filter keeps traced events and only planned callstacks") {
  const std::vector<TraceEvent> events{
      event(1, "A", std::nullopt, std::vector<std::string>{"A"}),
      event(2, "B", "A", std::vector<std::string>{"A", "B"}),
      event(3, "C", "B", std::vector<std::string>{"A", "B", "C"}),
  };
  TracePlan plan;
  plan.traced = {"A", "C"};
  plan.callstack = {"C"};
  const auto kept = filter_events(events, plan);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].function == "A");
  CHECK_FALSE(kept[0].callstack.has_value());
  CHECK(kept[1].seq == 3);
  CHECK(kept[1].callstack.has_value());
}
