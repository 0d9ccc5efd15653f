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

#include "afetm/diagnoser.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "afetm/json_io.hpp"

namespace afetm {

// --- Catalog --------------------------------------------------------------------

Catalog::Catalog(std::vector<FunctionId> functions)
    : functions_(std::move(functions)) {
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    if (!index_.emplace(functions_[i], i).second) {
      throw ValidationError("catalog: duplicate function '" + functions_[i] + "'");
    }
  }
}

std::size_t Catalog::column(std::string_view fn) const {
  auto it = index_.find(std::string(fn));
  return it == index_.end() ? oov_column() : it->second;
}

// --- Embedding ------------------------------------------------------------------

namespace {

void flatten(const CallTreeNode& n, int parent, int graph, const Catalog& catalog,
             GraphBatch& out) {
  const int self = static_cast<int>(out.function_column.size());
  out.function_column.push_back(catalog.column(n.function));
  out.placeholder.push_back(n.placeholder || n.color == Color::kBlue ? 1 : 0);
  out.graph_of_node.push_back(graph);
  if (parent >= 0) {
    out.edges.emplace_back(parent, self);
    out.edge_weights.push_back(1.0);
  }
  for (const auto& c : n.children) flatten(c, self, graph, catalog, out);
}

void finish(GraphBatch& b, const Catalog& catalog) {
  const int n = static_cast<int>(b.function_column.size());
  b.features = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(catalog.feature_dim()));
  for (int i = 0; i < n; ++i) {
    b.features(i, static_cast<Eigen::Index>(b.function_column[static_cast<std::size_t>(i)])) = 1.0;
    if (b.placeholder[static_cast<std::size_t>(i)]) {
      b.features(i, static_cast<Eigen::Index>(catalog.flag_column())) = 1.0;
    }
  }
  b.degree = Eigen::VectorXd::Ones(n);
  for (std::size_t e = 0; e < b.edges.size(); ++e) {
    b.degree(b.edges[e].first) += b.edge_weights[e];
    b.degree(b.edges[e].second) += b.edge_weights[e];
  }
  std::vector<Eigen::Triplet<double>> raw;
  std::vector<Eigen::Triplet<double>> norm;
  for (int i = 0; i < n; ++i) {
    raw.emplace_back(i, i, 1.0);
    norm.emplace_back(i, i, 1.0 / b.degree(i));
  }
  for (std::size_t e = 0; e < b.edges.size(); ++e) {
    const auto [u, v] = b.edges[e];
    const double w = b.edge_weights[e];
    const double s = w / std::sqrt(b.degree(u) * b.degree(v));
    raw.emplace_back(u, v, w);
    raw.emplace_back(v, u, w);
    norm.emplace_back(u, v, s);
    norm.emplace_back(v, u, s);
  }
  b.a_tilde.resize(n, n);
  b.a_tilde.setFromTriplets(raw.begin(), raw.end());
  b.a_hat.resize(n, n);
  b.a_hat.setFromTriplets(norm.begin(), norm.end());
}

}  // namespace

GraphBatch embed_tree(const CallTree& tree, const Catalog& catalog) {
  return embed_trees(std::span<const CallTree>(&tree, 1), catalog);
}

GraphBatch embed_trees(std::span<const CallTree> trees, const Catalog& catalog) {
  GraphBatch b;
  for (const auto& t : trees) {
    if (t.empty()) throw ValidationError("cannot embed an empty tree");
    for (const auto& r : t.roots) flatten(r, -1, b.graph_count, catalog, b);
    ++b.graph_count;
  }
  finish(b, catalog);
  return b;
}

Eigen::MatrixXd gcn_layer(const Eigen::MatrixXd& h, const GraphBatch& batch,
                          const Eigen::MatrixXd& w, bool activate) {
  if (h.rows() != batch.nodes() || h.cols() != w.rows()) {
    throw ValidationError("gcn_layer: dimension mismatch");
  }
  Eigen::MatrixXd out = batch.a_hat * (h * w);
  if (activate) out = out.cwiseMax(0.0);
  return out;
}

Eigen::MatrixXd gcn_layer_nodewise(const Eigen::MatrixXd& h,
                                   const GraphBatch& batch,
                                   const Eigen::MatrixXd& w, bool activate) {
  if (h.rows() != batch.nodes() || h.cols() != w.rows()) {
    throw ValidationError("gcn_layer: dimension mismatch");
  }
  const int n = batch.nodes();
  // Neighbours with their edge weights; the self loop has weight 1.
  std::vector<std::vector<std::pair<int, double>>> nbr(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) nbr[static_cast<std::size_t>(i)].emplace_back(i, 1.0);
  for (std::size_t e = 0; e < batch.edges.size(); ++e) {
    const auto [u, v] = batch.edges[e];
    nbr[static_cast<std::size_t>(u)].emplace_back(v, batch.edge_weights[e]);
    nbr[static_cast<std::size_t>(v)].emplace_back(u, batch.edge_weights[e]);
  }
  Eigen::MatrixXd out(n, w.cols());
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(h.cols());
    for (const auto& [j, e] : nbr[static_cast<std::size_t>(i)]) {
      acc += e / std::sqrt(batch.degree(j) * batch.degree(i)) * h.row(j);
    }
    Eigen::RowVectorXd row = acc * w;
    if (activate) row = row.cwiseMax(0.0);
    out.row(i) = row;
  }
  return out;
}

// --- Model ------------------------------------------------------------------------

std::size_t GcnModel::label_index(std::string_view label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw ValidationError("label '" + std::string(label) + "' is not in the model");
  }
  return static_cast<std::size_t>(it - labels.begin());
}

void TrainingConfig::validate() const {
  if (layers < 1) throw ValidationError("gcn: layers must be at least 1");
  if (hidden < 1) throw ValidationError("gcn: hidden must be at least 1");
  if (!(learning_rate > 0.0)) throw ValidationError("gcn: learning rate must be positive");
  if (epochs < 0) throw ValidationError("gcn: epochs must be non-negative");
  if (optimizer != "gd" && optimizer != "adam") {
    throw ValidationError("gcn: optimizer must be 'gd' or 'adam'");
  }
}

GcnModel init_model(Catalog catalog, std::vector<std::string> labels,
                    const TrainingConfig& config) {
  config.validate();
  if (labels.empty()) throw ValidationError("gcn: empty label table");
  GcnModel m;
  m.catalog = std::move(catalog);
  m.labels = std::move(labels);
  Eigen::Index in = static_cast<Eigen::Index>(m.catalog.feature_dim());
  for (int l = 0; l < config.layers; ++l) {
    const Eigen::Index out = config.hidden;
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    Rng rng(substream(config.seed, {0x676c6f726f74ULL, static_cast<std::uint64_t>(l)}));
    Eigen::MatrixXd w(in, out);
    for (Eigen::Index c = 0; c < out; ++c) {
      for (Eigen::Index r = 0; r < in; ++r) w(r, c) = (2.0 * uniform01(rng) - 1.0) * limit;
    }
    m.layers.push_back(std::move(w));
    in = out;
  }
  const auto k = static_cast<Eigen::Index>(m.labels.size());
  m.readout = Eigen::MatrixXd::Zero(config.hidden, k);
  m.readout_bias = Eigen::RowVectorXd::Zero(k);
  return m;
}

namespace {

// Layer inputs and pre-activations of one forward pass.
struct Activations {
  std::vector<Eigen::MatrixXd> inputs;  // H^l for l >= 1 (index l - 1)
  std::vector<Eigen::MatrixXd> pre;     // Z^l
  Eigen::RowVectorXd pooled;
  Eigen::RowVectorXd probs;
};

// X W0 without materializing X: each node gathers its function's row plus
// the flag row.
Eigen::MatrixXd first_product(const GraphBatch& g, const Eigen::MatrixXd& w0,
                              const Catalog& catalog) {
  Eigen::MatrixXd xw(g.nodes(), w0.cols());
  const auto flag = static_cast<Eigen::Index>(catalog.flag_column());
  for (int i = 0; i < g.nodes(); ++i) {
    const auto col = static_cast<Eigen::Index>(g.function_column[static_cast<std::size_t>(i)]);
    xw.row(i) = w0.row(col);
    if (g.placeholder[static_cast<std::size_t>(i)]) xw.row(i) += w0.row(flag);
  }
  return xw;
}

Eigen::RowVectorXd softmax(const Eigen::RowVectorXd& z) {
  const double mx = z.maxCoeff();
  Eigen::RowVectorXd e = (z.array() - mx).exp().matrix();
  return e / e.sum();
}

Activations run_forward(const GraphBatch& g, const GcnModel& m) {
  if (g.nodes() == 0) throw ValidationError("forward: empty graph");
  if (g.graph_count != 1) throw ValidationError("forward: expected one graph");
  Activations a;
  Eigen::MatrixXd h;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    Eigen::MatrixXd z = l == 0 ? Eigen::MatrixXd(g.a_hat * first_product(g, m.layers[0], m.catalog))
                               : Eigen::MatrixXd(g.a_hat * (h * m.layers[l]));
    h = z.cwiseMax(0.0);
    a.pre.push_back(std::move(z));
    a.inputs.push_back(h);
  }
  a.pooled = h.colwise().mean();
  a.probs = softmax(a.pooled * m.readout + m.readout_bias);
  return a;
}

Gradients zero_gradients(const GcnModel& m) {
  Gradients g;
  for (const auto& w : m.layers) g.layers.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  g.readout = Eigen::MatrixXd::Zero(m.readout.rows(), m.readout.cols());
  g.readout_bias = Eigen::RowVectorXd::Zero(m.readout_bias.cols());
  return g;
}

void add_into(Gradients& into, const Gradients& from) {
  for (std::size_t l = 0; l < into.layers.size(); ++l) into.layers[l] += from.layers[l];
  into.readout += from.readout;
  into.readout_bias += from.readout_bias;
}

// Adds the (unnormalized) loss and gradient contribution of one sample.
double accumulate(const GcnModel& m, const GraphBatch& g, const TrainingSample& s,
                  Gradients* grads) {
  const Activations a = run_forward(g, m);
  const auto k = static_cast<Eigen::Index>(m.labels.size());
  if (static_cast<Eigen::Index>(s.label_counts.size()) != k) {
    throw ValidationError("training sample label counts do not match the model");
  }
  Eigen::RowVectorXd counts(k);
  for (Eigen::Index c = 0; c < k; ++c) counts(c) = s.label_counts[static_cast<std::size_t>(c)];
  double loss = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts(c) > 0.0) loss -= counts(c) * std::log(std::max(a.probs(c), 1e-300));
  }
  if (grads == nullptr) return loss;

  const Eigen::RowVectorXd dlogits = a.probs * counts.sum() - counts;
  grads->readout += a.pooled.transpose() * dlogits;
  grads->readout_bias += dlogits;
  const Eigen::RowVectorXd dpool = dlogits * m.readout.transpose();
  const int n = g.nodes();
  Eigen::MatrixXd dh = Eigen::MatrixXd::Ones(n, 1) * (dpool / static_cast<double>(n));
  for (std::size_t l = m.layers.size(); l-- > 0;) {
    const Eigen::MatrixXd dz = dh.cwiseProduct((a.pre[l].array() > 0.0).cast<double>().matrix());
    const Eigen::MatrixXd adz = g.a_hat * dz;  // a_hat is symmetric
    if (l == 0) {
      const auto flag = static_cast<Eigen::Index>(m.catalog.flag_column());
      for (int i = 0; i < n; ++i) {
        const auto col = static_cast<Eigen::Index>(g.function_column[static_cast<std::size_t>(i)]);
        grads->layers[0].row(col) += adz.row(i);
        if (g.placeholder[static_cast<std::size_t>(i)]) grads->layers[0].row(flag) += adz.row(i);
      }
    } else {
      grads->layers[l] += a.inputs[l - 1].transpose() * adz;
      dh = adz * m.layers[l].transpose();
    }
  }
  return loss;
}

constexpr std::size_t kChunk = 32;

}  // namespace

double loss_and_gradients(const GcnModel& model, std::span<const GraphBatch> graphs,
                          std::span<const TrainingSample> samples, Gradients* grads,
                          unsigned jobs) {
  if (graphs.size() != samples.size()) {
    throw ValidationError("loss: graphs and samples differ in count");
  }
  double total_count = 0.0;
  for (const auto& s : samples) {
    total_count += std::accumulate(s.label_counts.begin(), s.label_counts.end(), 0.0);
  }
  if (!(total_count > 0.0)) throw ValidationError("loss: no labelled samples");

  // Fixed chunks reduced in order keep results independent of `jobs`.
  const std::size_t chunks = (samples.size() + kChunk - 1) / kChunk;
  std::vector<double> losses(chunks, 0.0);
  std::vector<Gradients> partial;
  if (grads != nullptr) partial.assign(chunks, zero_gradients(model));
  parallel_for(chunks, jobs, [&](std::size_t c) {
    const std::size_t end = std::min(samples.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      losses[c] += accumulate(model, graphs[i], samples[i],
                              grads != nullptr ? &partial[c] : nullptr);
    }
  });
  double loss = 0.0;
  for (double l : losses) loss += l;
  if (grads != nullptr) {
    *grads = zero_gradients(model);
    for (const auto& p : partial) add_into(*grads, p);
    const double scale = 1.0 / total_count;
    for (auto& w : grads->layers) w *= scale;
    grads->readout *= scale;
    grads->readout_bias *= scale;
  }
  return loss / total_count;
}

namespace {

class Optimizer {
 public:
  Optimizer(const GcnModel& m, const TrainingConfig& c)
      : config_(c), m1_(zero_gradients(m)), m2_(zero_gradients(m)) {}

  void step(GcnModel& m, const Gradients& g) {
    ++t_;
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      apply(m.layers[l], g.layers[l], m1_.layers[l], m2_.layers[l]);
    }
    apply(m.readout, g.readout, m1_.readout, m2_.readout);
    apply(m.readout_bias, g.readout_bias, m1_.readout_bias, m2_.readout_bias);
  }

 private:
  template <class M>
  void apply(M& param, const M& grad, M& m1, M& m2) {
    const double lr = config_.learning_rate;
    if (config_.optimizer == "gd") {
      param -= lr * grad;
      return;
    }
    constexpr double kB1 = 0.9;
    constexpr double kB2 = 0.999;
    constexpr double kEps = 1e-8;
    m1 = kB1 * m1 + (1.0 - kB1) * grad;
    m2 = kB2 * m2 + (1.0 - kB2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(kB1, t_);
    const double c2 = 1.0 - std::pow(kB2, t_);
    param.array() -= lr * (m1.array() / c1) / ((m2.array() / c2).sqrt() + kEps);
  }

  const TrainingConfig& config_;
  Gradients m1_;
  Gradients m2_;
  int t_ = 0;
};

}  // namespace

GcnModel train_samples(Catalog catalog, std::vector<std::string> labels,
                       std::span<const TrainingSample> samples,
                       const TrainingConfig& config,
                       std::vector<double>* loss_curve) {
  if (samples.empty()) throw ValidationError("train: no training samples");
  GcnModel model = init_model(std::move(catalog), std::move(labels), config);
  std::vector<GraphBatch> graphs;
  graphs.reserve(samples.size());
  for (const auto& s : samples) graphs.push_back(embed_tree(s.tree, model.catalog));

  Optimizer opt(model, config);
  Gradients grads;
  double loss = loss_and_gradients(model, graphs, samples, &grads, config.jobs);
  int epoch = 0;
  for (; epoch < config.epochs && loss >= config.early_stop_loss; ++epoch) {
    if (loss_curve != nullptr) loss_curve->push_back(loss);
    opt.step(model, grads);
    loss = loss_and_gradients(model, graphs, samples, &grads, config.jobs);
  }
  if (loss_curve != nullptr) loss_curve->push_back(loss);
  model.final_loss = loss;
  model.epochs_run = epoch;
  return model;
}

CallTree training_view(const CallTree& fct, const FunctionSet& traced) {
  const auto colored = color_fcts(std::span<const CallTree>(&fct, 1), traced);
  CallTree view = collapse_duplicates(mask_red(colored.colored.front()));
  auto mark = [](auto& self, CallTreeNode& n) -> void {
    n.placeholder = n.color == Color::kBlue;
    n.color = Color::kNone;
    for (auto& c : n.children) self(self, c);
  };
  for (auto& r : view.roots) mark(mark, r);
  return view;
}

GcnModel train(const Fddb& fddb, const TracePlan& plan, const TrainingConfig& config,
               std::vector<double>* loss_curve) {
  std::vector<std::string> labels{std::string(kNormalLabel)};
  {
    std::set<std::string> fault_labels;
    for (const auto& r : fddb.records) {
      if (!r.unactivated) fault_labels.insert(r.label);
    }
    labels.insert(labels.end(), fault_labels.begin(), fault_labels.end());
  }
  std::map<std::string, std::size_t> label_pos;
  for (std::size_t i = 0; i < labels.size(); ++i) label_pos[labels[i]] = i;

  std::vector<TrainingSample> samples;
  std::map<std::string, std::size_t> by_key;
  FunctionSet functions;
  std::size_t dropped = 0;
  auto add = [&](const CallTree& fct, std::size_t label) {
    CallTree view = training_view(fct, plan.traced);
    if (view.empty()) {
      ++dropped;
      return;
    }
    for (const auto& f : preorder(view)) functions.insert(f);
    auto [it, inserted] = by_key.try_emplace(canonical_form(view), samples.size());
    if (inserted) {
      samples.push_back(TrainingSample{std::move(view), std::vector<double>(labels.size(), 0.0)});
    }
    samples[it->second].label_counts[label] += 1.0;
  };
  for (const auto& t : fddb.normal) add(t, 0);
  for (const auto& r : fddb.records) {
    if (r.unactivated) continue;
    for (const auto& t : r.fcts) add(t, label_pos.at(r.label));
  }
  if (samples.empty()) {
    throw Error("train: every FDDB tree is empty after masking untraced "
                "functions; increase the trace budget");
  }
  (void)dropped;
  return train_samples(Catalog({functions.begin(), functions.end()}), std::move(labels),
                       samples, config, loss_curve);
}

// --- Inference --------------------------------------------------------------------

std::vector<std::pair<std::string, double>> Diagnosis::top(std::size_t k) const {
  return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(std::min(k, ranked.size()))};
}

std::vector<FunctionId> Diagnosis::candidate_functions(std::size_t k) const {
  std::vector<FunctionId> out;
  for (const auto& [label, p] : ranked) {
    if (out.size() >= k) break;
    const auto f = label_function(label);
    if (f && std::find(out.begin(), out.end(), *f) == out.end()) out.push_back(*f);
  }
  return out;
}

bool Diagnosis::locates_within(std::string_view fn, std::size_t k) const {
  const auto c = candidate_functions(k);
  return std::find(c.begin(), c.end(), fn) != c.end();
}

Diagnosis make_diagnosis(std::span<const std::string> labels, std::span<const double> scores) {
  Diagnosis d;
  for (std::size_t i = 0; i < labels.size(); ++i) d.ranked.emplace_back(labels[i], scores[i]);
  std::sort(d.ranked.begin(), d.ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (!d.ranked.empty() && d.ranked.front().first != kNormalLabel) {
    d.error_detected = true;
    d.located = label_function(d.ranked.front().first);
  }
  return d;
}

Eigen::VectorXd forward_probabilities(const GraphBatch& graph, const GcnModel& model) {
  return run_forward(graph, model).probs.transpose();
}

Diagnosis forward(const GraphBatch& graph, const GcnModel& model) {
  const Eigen::VectorXd p = forward_probabilities(graph, model);
  return make_diagnosis(model.labels, std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
}

Diagnosis diagnose(const CallTree& afct, const GcnModel& model) {
  if (afct.empty()) throw ValidationError("diagnose: the AFCT is empty");
  return forward(embed_tree(afct, model.catalog), model);
}

// --- Persistence -----------------------------------------------------------------

namespace {

Json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& ctx) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
      throw ParseError(ctx + ": data size does not match its shape");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ctx + ": " + e.what());
  }
}

}  // namespace

void save_model(const GcnModel& model, const std::filesystem::path& path) {
  Json layers = Json::array();
  for (const auto& w : model.layers) layers.push_back(matrix_to_json(w));
  Json j{{"format", "afetm-gcn"},
         {"version", 1},
         {"catalog", model.catalog.functions()},
         {"labels", model.labels},
         {"layers", std::move(layers)},
         {"readout", matrix_to_json(model.readout)},
         {"readout_bias", matrix_to_json(model.readout_bias)},
         {"final_loss", model.final_loss},
         {"epochs_run", model.epochs_run}};
  write_json_file(path, j);
}

GcnModel load_model(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  check_keys(j, {"format", "version", "catalog", "labels", "layers", "readout",
                 "readout_bias", "final_loss", "epochs_run"},
             "model");
  if (j.value("format", "") != "afetm-gcn" || j.value("version", 0) != 1) {
    throw ParseError(path.string() + ": not a version 1 GCN model file");
  }
  GcnModel m;
  try {
    m.catalog = Catalog(j.at("catalog").get<std::vector<std::string>>());
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.final_loss = j.value("final_loss", 0.0);
    m.epochs_run = j.value("epochs_run", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  const Json& layers = j.at("layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    m.layers.push_back(matrix_from_json(layers[l], "model.layers[" + std::to_string(l) + "]"));
  }
  m.readout = matrix_from_json(j.at("readout"), "model.readout");
  const Eigen::MatrixXd bias = matrix_from_json(j.at("readout_bias"), "model.readout_bias");
  if (bias.rows() != 1) throw ValidationError("model: readout bias must be one row");
  m.readout_bias = bias.row(0);
  // Shape chain checks.
  Eigen::Index in = static_cast<Eigen::Index>(m.catalog.feature_dim());
  for (const auto& w : m.layers) {
    if (w.rows() != in) throw ValidationError("model: layer shapes do not chain");
    in = w.cols();
  }
  if (m.layers.empty() || m.readout.rows() != in ||
      m.readout.cols() != static_cast<Eigen::Index>(m.labels.size()) ||
      m.readout_bias.cols() != m.readout.cols()) {
    throw ValidationError("model: readout shape does not match the label table");
  }
  return m;
}

}  // namespace afetm
