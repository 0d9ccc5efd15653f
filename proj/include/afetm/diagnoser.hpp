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

// Graph-convolutional classifier over call trees. A tree is embedded as an
// undirected graph, passed through L propagation layers
//   H' = relu(D^-1/2 (A + I) D^-1/2 H W),
// mean-pooled, and mapped to (function, fault) labels plus "normal".

#ifndef AFETM_DIAGNOSER_HPP_
#define AFETM_DIAGNOSER_HPP_

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "afetm/calltree.hpp"
#include "afetm/injector.hpp"

namespace afetm {

// Function name -> feature column. Column size() is the out-of-vocabulary
// slot and size() + 1 the placeholder flag.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<FunctionId> functions);

  const std::vector<FunctionId>& functions() const { return functions_; }
  std::size_t size() const { return functions_.size(); }
  std::size_t feature_dim() const { return functions_.size() + 2; }
  std::size_t column(std::string_view fn) const;  // OOV slot if unknown
  std::size_t oov_column() const { return functions_.size(); }
  std::size_t flag_column() const { return functions_.size() + 1; }

 private:
  std::vector<FunctionId> functions_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct GraphBatch {
  Eigen::MatrixXd features;  // H0, one row per node
  // Undirected edges (parent, child) with weight e_ji.
  std::vector<std::pair<int, int>> edges;
  std::vector<double> edge_weights;
  Eigen::VectorXd degree;                // d_i = 1 + sum of incident weights
  Eigen::SparseMatrix<double> a_tilde;   // A + I
  Eigen::SparseMatrix<double> a_hat;     // D^-1/2 (A + I) D^-1/2
  std::vector<int> graph_of_node;
  int graph_count = 0;
  // Per node: feature column of its function and its placeholder flag, so
  // the first layer can gather rows instead of multiplying by H0.
  std::vector<std::size_t> function_column;
  std::vector<std::uint8_t> placeholder;

  int nodes() const { return static_cast<int>(features.rows()); }
};

// Edge weights default to 1.0. Throws on an empty tree.
GraphBatch embed_tree(const CallTree& tree, const Catalog& catalog);
// Several graphs as one block-diagonal batch.
GraphBatch embed_trees(std::span<const CallTree> trees, const Catalog& catalog);

// Matrix form of one propagation step.
Eigen::MatrixXd gcn_layer(const Eigen::MatrixXd& h, const GraphBatch& batch,
                          const Eigen::MatrixXd& w, bool activate);
// Per-node form: h'_i = sum_{j in N(i) + i} e_ji / sqrt(d_j d_i) h_j W.
Eigen::MatrixXd gcn_layer_nodewise(const Eigen::MatrixXd& h,
                                   const GraphBatch& batch,
                                   const Eigen::MatrixXd& w, bool activate);

struct GcnModel {
  Catalog catalog;
  std::vector<std::string> labels;  // labels[0] is "normal"
  std::vector<Eigen::MatrixXd> layers;
  Eigen::MatrixXd readout;          // hidden x labels
  Eigen::RowVectorXd readout_bias;  // 1 x labels
  double final_loss = 0.0;
  int epochs_run = 0;

  std::size_t label_index(std::string_view label) const;  // throws if absent
};

struct TrainingConfig {
  int layers = 3;
  int hidden = 64;
  double learning_rate = 0.05;
  int epochs = 500;
  double early_stop_loss = 1e-3;
  std::string optimizer = "gd";  // "gd" or "adam"
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  void validate() const;
};

// Glorot-uniform layers, zero readout.
GcnModel init_model(Catalog catalog, std::vector<std::string> labels,
                    const TrainingConfig& config);

// One graph with its target label distribution (counts per label index).
struct TrainingSample {
  CallTree tree;
  std::vector<double> label_counts;
};

struct Gradients {
  std::vector<Eigen::MatrixXd> layers;
  Eigen::MatrixXd readout;
  Eigen::RowVectorXd readout_bias;
};

// Mean cross-entropy over all label occurrences, and optionally its
// gradient with respect to every parameter.
double loss_and_gradients(const GcnModel& model,
                          std::span<const GraphBatch> graphs,
                          std::span<const TrainingSample> samples,
                          Gradients* grads, unsigned jobs = 1);

// Trains on already masked trees grouped by shape.
GcnModel train_samples(Catalog catalog, std::vector<std::string> labels,
                       std::span<const TrainingSample> samples,
                       const TrainingConfig& config,
                       std::vector<double>* loss_curve = nullptr);

// Colors FDDB trees with the plan, masks red nodes, groups identical masked
// trees and trains. Unactivated records are skipped; empty masked trees are
// dropped, and an error is raised if nothing remains.
GcnModel train(const Fddb& fddb, const TracePlan& plan,
               const TrainingConfig& config,
               std::vector<double>* loss_curve = nullptr);

// Masked, collapsed training tree for an FDDB tree.
CallTree training_view(const CallTree& fct, const FunctionSet& traced);

struct Diagnosis {
  std::vector<std::pair<std::string, double>> ranked;  // descending
  bool error_detected = false;
  std::optional<FunctionId> located;

  std::vector<std::pair<std::string, double>> top(std::size_t k) const;
  // Distinct functions in rank order, skipping `normal`; at most k.
  std::vector<FunctionId> candidate_functions(std::size_t k) const;
  // True if `fn` is among the first k candidate functions.
  bool locates_within(std::string_view fn, std::size_t k) const;
};

// Ranks labels by probability; ties break by label.
Diagnosis make_diagnosis(std::span<const std::string> labels,
                         std::span<const double> scores);

Eigen::VectorXd forward_probabilities(const GraphBatch& graph,
                                      const GcnModel& model);
Diagnosis forward(const GraphBatch& graph, const GcnModel& model);
// Throws on an empty tree.
Diagnosis diagnose(const CallTree& afct, const GcnModel& model);

void save_model(const GcnModel& model, const std::filesystem::path& path);
GcnModel load_model(const std::filesystem::path& path);

}  // namespace afetm

#endif  // AFETM_DIAGNOSER_HPP_
