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

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "afetm/diagnoser.hpp"
#include "afetm/fault.hpp"
#include "afetm/progmodel.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace afetm;
using testutil::tree;

namespace {

Catalog abc() { return Catalog({"A", "B", "C", "D", "E"}); }

// Random tree over the abc() catalog with up to max_nodes nodes.
CallTree random_tree(Rng& rng, std::size_t max_nodes) {
  const std::vector<std::string> names{"A", "B", "C", "D", "E", "Z"};
  const std::size_t n = 1 + uniform_index(rng, max_nodes);
  CallTree t(CallTreeNode(names[uniform_index(rng, names.size())]));
  std::vector<CallTreeNode*> nodes{&t.roots[0]};
  for (std::size_t i = 1; i < n; ++i) {
    CallTreeNode* parent = nodes[uniform_index(rng, nodes.size())];
    parent->children.reserve(n);  // no reallocation, so pointers stay valid
    parent->children.emplace_back(names[uniform_index(rng, names.size())]);
    parent->children.back().placeholder = uniform01(rng) < 0.2;
    nodes.push_back(&parent->children.back());
  }
  return t;
}

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 2.0 * uniform01(rng) - 1.0;
  return m;
}

std::vector<TrainingSample> toy_samples() {
  return {
      TrainingSample{tree("A(B)"), {1.0, 0.0, 0.0}},
      TrainingSample{tree("A(B(C))"), {0.0, 1.0, 0.0}},
      TrainingSample{tree("A(D E)"), {0.0, 0.0, 1.0}},
  };
}

const std::vector<std::string> kToyLabels{"normal", "C:crash", "D:deadlock"};

}  // namespace

TEST_CASE("embedding small trees") {
  const auto one = embed_tree(tree("A"), abc());
  CHECK(Eigen::MatrixXd(one.a_tilde) == Eigen::MatrixXd::Ones(1, 1));
  CHECK(one.degree(0) == 1.0);

  const auto two = embed_tree(tree("A(B)"), abc());
  CHECK(Eigen::MatrixXd(two.a_tilde) == Eigen::MatrixXd::Ones(2, 2));
  CHECK(two.degree(0) == 2.0);
  CHECK(two.degree(1) == 2.0);

  const auto ph = embed_tree(tree("A(Q* C)"), abc());
  CHECK(ph.nodes() == 3);
  CHECK(ph.edges.size() == 2);
  CHECK(ph.features(1, static_cast<Eigen::Index>(abc().oov_column())) == 1.0);
  CHECK(ph.features(1, static_cast<Eigen::Index>(abc().flag_column())) == 1.0);

  CHECK_THROWS_AS(embed_tree(CallTree{}, abc()), ValidationError);
}

TEST_CASE("embedding the webshop tree") {
  const auto model = load_program_spec(testutil::webshop_path());
  const auto fct = execute_request(model, "buy", 7).fct;
  std::vector<FunctionId> ids;
  for (const auto& f : model.functions()) ids.push_back(f.id);
  const auto g = embed_tree(fct, Catalog(ids));
  CHECK(static_cast<std::size_t>(g.nodes()) == fct.size());
  CHECK(g.edges.size() == fct.size() - 1);
}

TEST_CASE("propagation examples") {
  const auto one = embed_tree(tree("A"), abc());
  Eigen::MatrixXd h(1, 2);
  h << 1, 0;
  CHECK(gcn_layer(h, one, Eigen::MatrixXd::Identity(2, 2), true) == h);

  const auto two = embed_tree(tree("A(B)"), abc());
  Eigen::MatrixXd h2(2, 1);
  h2 << 1, 3;
  const auto out = gcn_layer(h2, two, Eigen::MatrixXd::Ones(1, 1), false);
  CHECK(out(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(out(1, 0) == doctest::Approx(2.0).epsilon(1e-12));

  Rng rng(1);
  const auto w = random_matrix(rng, 3, 4);
  const auto g = embed_tree(tree("A(B C(D))"), abc());
  CHECK(gcn_layer(Eigen::MatrixXd::Zero(4, 3), g, w, true).isZero());
  CHECK_THROWS(gcn_layer(Eigen::MatrixXd::Zero(4, 2), g, w, true));
}

TEST_CASE("matrix, node-wise and dense forms agree") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_tree(rng, 50);
    const auto g = embed_tree(t, abc());
    const auto h = random_matrix(rng, g.nodes(), 4);
    const auto w = random_matrix(rng, 4, 3);
    for (bool act : {false, true}) {
      const auto m = gcn_layer(h, g, w, act);
      CHECK((m - gcn_layer_nodewise(h, g, w, act)).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((m - oracle::dense_gcn_layer(h, g.edges, w, act)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("pooled output is invariant to node order") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = random_tree(rng, 30);
    const auto g = embed_tree(t, abc());
    const Eigen::Index n = g.nodes();
    const auto w1 = random_matrix(rng, g.features.cols(), 5);
    const auto w2 = random_matrix(rng, 5, 5);
    Eigen::MatrixXd h = gcn_layer(gcn_layer(g.features, g, w1, true), g, w2, true);
    const Eigen::RowVectorXd pooled = h.colwise().mean();

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd x(n, g.features.cols());
    for (Eigen::Index i = 0; i < n; ++i) x.row(perm[static_cast<std::size_t>(i)]) = g.features.row(i);
    std::vector<std::pair<int, int>> edges;
    for (const auto& [u, v] : g.edges) {
      edges.emplace_back(perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)]);
    }
    const Eigen::MatrixXd hp = oracle::dense_gcn_layer(
        oracle::dense_gcn_layer(x, edges, w1, true), edges, w2, true);
    CHECK((hp.colwise().mean() - pooled).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("untrained model is uniform and outputs distributions") {
  TrainingConfig cfg;
  cfg.hidden = 8;
  auto model = init_model(abc(), kToyLabels, cfg);
  const auto p = forward_probabilities(embed_tree(tree("A(B)"), model.catalog), model);
  for (Eigen::Index i = 0; i < p.size(); ++i) CHECK(p(i) == doctest::Approx(1.0 / 3.0));

  Rng rng(3);
  model.readout = random_matrix(rng, 8, 3) * 5.0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto q = forward_probabilities(embed_tree(random_tree(rng, 20), model.catalog), model);
    CHECK(q.minCoeff() >= 0.0);
    CHECK(std::abs(q.sum() - 1.0) < 1e-9);
  }
  // Only unknown functions still yield a distribution.
  const auto oov = diagnose(tree("X(Y Z)"), model);
  double total = 0.0;
  for (const auto& [l, v] : oov.ranked) total += v;
  CHECK(total == doctest::Approx(1.0));
  CHECK_THROWS_AS(diagnose(CallTree{}, model), ValidationError);
}

TEST_CASE("gradients match finite differences") {
  TrainingConfig cfg;
  cfg.hidden = 4;
  cfg.layers = 3;
  cfg.seed = 5;
  auto model = init_model(abc(), kToyLabels, cfg);
  Rng rng(9);
  model.readout = random_matrix(rng, 4, 3);
  model.readout_bias = random_matrix(rng, 1, 3);
  const std::vector<TrainingSample> samples{TrainingSample{tree("A(B C*)"), {0.0, 2.0, 1.0}}};
  const std::vector<GraphBatch> graphs{embed_tree(samples[0].tree, model.catalog)};
  CHECK(oracle::max_gradient_rel_error(model, graphs, samples) < 1e-4);
}

TEST_CASE("training separates a toy dataset") {
  TrainingConfig cfg;
  cfg.hidden = 16;
  cfg.epochs = 200;
  cfg.learning_rate = 0.5;
  cfg.seed = 1;
  const auto samples = toy_samples();
  std::vector<double> curve;
  const auto model = train_samples(abc(), kToyLabels, samples, cfg, &curve);
  REQUIRE(curve.size() >= 2);
  CHECK(curve[1] < curve[0]);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(diagnose(samples[i].tree, model).ranked.front().first == kToyLabels[i]);
  }
  const auto normal = diagnose(tree("A(B)"), model);
  CHECK_FALSE(normal.error_detected);
  const auto crash = diagnose(tree("A(B(C))"), model);
  CHECK(crash.error_detected);
  CHECK(crash.located == std::optional<FunctionId>("C"));

  // Same seed, same weights.
  const auto again = train_samples(abc(), kToyLabels, samples, cfg);
  for (std::size_t l = 0; l < model.layers.size(); ++l) CHECK(model.layers[l] == again.layers[l]);
  CHECK(model.readout == again.readout);

  // Thread count does not change the result.
  cfg.jobs = 4;
  const auto parallel = train_samples(abc(), kToyLabels, samples, cfg);
  CHECK(model.readout == parallel.readout);
}

TEST_CASE("adam also converges") {
  TrainingConfig cfg;
  cfg.hidden = 16;
  cfg.epochs = 200;
  cfg.optimizer = "adam";
  cfg.learning_rate = 0.01;
  const auto samples = toy_samples();
  const auto model = train_samples(abc(), kToyLabels, samples, cfg);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(diagnose(samples[i].tree, model).ranked.front().first == kToyLabels[i]);
  }
}

TEST_CASE("training from an FDDB") {
  Fddb db;
  db.normal = {tree("main(A(B) C)")};
  FddbRecord crash;
  crash.fault.kind = FaultKind::kCrash;
  crash.fault.target = "A";
  crash.label = crash.fault.label();
  crash.fcts = {tree("main(A)")};
  FddbRecord hang;
  hang.fault.kind = FaultKind::kDeadlock;
  hang.fault.target = "C";
  hang.label = hang.fault.label();
  hang.fcts = {tree("main(A(B) C)"), tree("main(A(B) C(B))")};
  FddbRecord idle;
  idle.fault.target = "Z";
  idle.label = idle.fault.label();
  idle.unactivated = true;
  db.records = {crash, hang, idle};

  TracePlan plan;
  plan.traced = {"main", "A", "B", "C"};
  TrainingConfig cfg;
  cfg.hidden = 16;
  cfg.epochs = 300;
  cfg.learning_rate = 0.5;
  const auto model = train(db, plan, cfg);
  CHECK(model.labels == std::vector<std::string>{"normal", "A:crash", "C:deadlock"});
  CHECK(diagnose(tree("main(A)"), model).ranked.front().first == "A:crash");
  CHECK(diagnose(tree("main(A(B) C(B))"), model).ranked.front().first == "C:deadlock");

  plan.traced = {};
  CHECK_THROWS_AS(train(db, plan, cfg), Error);
}

TEST_CASE("training view masks and flags placeholders") {
  const auto view = training_view(tree("main(A(B(C(D)) E))"), FunctionSet{"A", "C", "D"});
  CHECK(shape_key(view) == shape_key(tree("main(A(B(C(D))))")));
  CHECK(view.roots[0].placeholder);
  CHECK_FALSE(view.roots[0].children[0].placeholder);
  CHECK(view.roots[0].children[0].children[0].placeholder);
}

TEST_CASE("diagnosis ranking and candidates") {
  const std::vector<std::string> labels{"normal", "f:crash", "f:deadlock", "g:crash", "h:crash"};
  const std::vector<double> scores{0.3, 0.25, 0.2, 0.15, 0.1};
  const auto d = make_diagnosis(labels, scores);
  CHECK_FALSE(d.error_detected);
  CHECK_FALSE(d.located.has_value());
  CHECK(d.candidate_functions(3) == std::vector<FunctionId>{"f", "g", "h"});
  CHECK(d.locates_within("h", 3));
  CHECK_FALSE(d.locates_within("h", 2));
  CHECK(d.top(2).size() == 2);

  const auto tie = make_diagnosis(std::vector<std::string>{"normal", "b:crash", "a:crash"},
                                  std::vector<double>{0.2, 0.4, 0.4});
  CHECK(tie.ranked.front().first == "a:crash");
  CHECK(tie.located == std::optional<FunctionId>("a"));
}

TEST_CASE("model files round-trip") {
  TrainingConfig cfg;
  cfg.hidden = 6;
  cfg.epochs = 20;
  const auto model = train_samples(abc(), kToyLabels, toy_samples(), cfg);
  const auto path = std::filesystem::temp_directory_path() / "afetm_test_model.json";
  save_model(model, path);
  const auto back = load_model(path);
  std::filesystem::remove(path);
  CHECK(back.labels == model.labels);
  CHECK(back.catalog.functions() == model.catalog.functions());
  for (std::size_t l = 0; l < model.layers.size(); ++l) CHECK(back.layers[l] == model.layers[l]);
  CHECK(back.readout == model.readout);
  CHECK(back.readout_bias == model.readout_bias);
}

TEST_CASE("config validation") {
  TrainingConfig cfg;
  cfg.layers = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.optimizer = "sgd";
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
