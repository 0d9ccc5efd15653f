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

// Reference implementations used only by tests. Each one follows the
// definition directly and shares no code with the library.

#ifndef AFETM_TESTS_ORACLES_HPP_
#define AFETM_TESTS_ORACLES_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "afetm/calltree.hpp"
#include "afetm/common.hpp"
#include "afetm/diagnoser.hpp"
#include "afetm/selector.hpp"

namespace afetm::oracle {

// --- Set cover ----------------------------------------------------------------

// Objective straight from its definition: uncovered fraction weighted by
// n/(n+1) plus the budget share weighted by 1/(n+1).
inline double fitness(const CoverageInstance& inst, const std::vector<int>& x) {
  const double n = static_cast<double>(inst.n);
  std::vector<int> hit(inst.n, 0);
  double weight = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!x[j]) continue;
    weight += inst.w[j];
    for (std::size_t b : inst.covers[j]) hit[b] = 1;
  }
  double covered = 0.0;
  for (int h : hit) covered += h;
  const double uncovered = inst.n == 0 ? 0.0 : 1.0 - covered / n;
  return n / (n + 1.0) * uncovered + 1.0 / (n + 1.0) * weight / inst.w_ub;
}

struct CoverOptimum {
  double fitness = std::numeric_limits<double>::infinity();
  std::vector<int> x;
};

// Minimum fitness over every subset whose weight stays within w_ub.
inline CoverOptimum best_cover(const CoverageInstance& inst) {
  CoverOptimum best;
  const std::size_t m = inst.m();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<int> x(m);
    double weight = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      x[j] = static_cast<int>((mask >> j) & 1U);
      if (x[j]) weight += inst.w[j];
    }
    if (weight > inst.w_ub + 1e-12) continue;
    const double f = fitness(inst, x);
    if (f < best.fitness) best = {f, x};
  }
  return best;
}

// --- Ordered labeled forests ----------------------------------------------------

struct Node {
  char label = 'a';
  std::vector<Node> children;
};
using Forest = std::vector<Node>;

inline void serialize(const Forest& f, std::string& out) {
  for (const Node& n : f) {
    out.push_back(n.label);
    if (!n.children.empty()) {
      out.push_back('(');
      serialize(n.children, out);
      out.push_back(')');
    }
  }
}

inline std::string key(const Forest& f) {
  std::string s;
  serialize(f, s);
  return s;
}

inline std::size_t count_nodes(const Forest& f) {
  std::size_t n = 0;
  for (const Node& x : f) n += 1 + count_nodes(x.children);
  return n;
}

// Every ordered forest with exactly n nodes over `alphabet`.
inline std::vector<Forest> forests_of_size(std::size_t n, const std::string& alphabet,
                                           std::map<std::size_t, std::vector<Forest>>& memo) {
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  std::vector<Forest> out;
  if (n == 0) {
    out.push_back({});
  } else {
    // First tree takes k nodes (root plus k-1 in its children forest).
    for (std::size_t k = 1; k <= n; ++k) {
      const auto kids = forests_of_size(k - 1, alphabet, memo);
      const auto rest = forests_of_size(n - k, alphabet, memo);
      for (char c : alphabet) {
        for (const Forest& ch : kids) {
          for (const Forest& r : rest) {
            Forest f;
            f.push_back(Node{c, ch});
            f.insert(f.end(), r.begin(), r.end());
            out.push_back(std::move(f));
          }
        }
      }
    }
  }
  memo[n] = out;
  return out;
}

// Forests reachable by deleting one node (its children take its place) or
// relabeling one node.
inline std::vector<Forest> single_edits(const Forest& f, const std::string& alphabet) {
  std::vector<Forest> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    Forest del(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(i));
    del.insert(del.end(), f[i].children.begin(), f[i].children.end());
    del.insert(del.end(), f.begin() + static_cast<std::ptrdiff_t>(i) + 1, f.end());
    out.push_back(std::move(del));
    for (char c : alphabet) {
      if (c == f[i].label) continue;
      Forest rel = f;
      rel[i].label = c;
      out.push_back(std::move(rel));
    }
    for (Forest& sub : single_edits(f[i].children, alphabet)) {
      Forest g = f;
      g[i].children = std::move(sub);
      out.push_back(std::move(g));
    }
  }
  return out;
}

// Unit-cost edit distances between all trees with at most `max_nodes` nodes,
// found by breadth-first search over edit scripts. Insertions are reversed
// deletions, so the edit graph is undirected. An optimal script can delete
// first, relabel, then insert, so it never needs more than max_nodes nodes
// and the search space is closed.
class EditScriptOracle {
 public:
  EditScriptOracle(std::size_t max_nodes, std::string alphabet) {
    std::map<std::size_t, std::vector<Forest>> memo;
    for (std::size_t n = 0; n <= max_nodes; ++n) {
      for (Forest& f : forests_of_size(n, alphabet, memo)) {
        index_.emplace(key(f), states_.size());
        states_.push_back(std::move(f));
      }
    }
    adj_.resize(states_.size());
    for (std::size_t s = 0; s < states_.size(); ++s) {
      for (const Forest& g : single_edits(states_[s], alphabet)) {
        const std::size_t t = index_.at(key(g));
        adj_[s].push_back(static_cast<int>(t));
        adj_[t].push_back(static_cast<int>(s));
      }
    }
    for (auto& a : adj_) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    for (std::size_t s = 0; s < states_.size(); ++s) {
      if (states_[s].size() == 1) trees_.push_back(s);
    }
  }

  // State indices of single-rooted forests.
  const std::vector<std::size_t>& trees() const { return trees_; }
  const Forest& state(std::size_t s) const { return states_[s]; }
  std::size_t state_count() const { return states_.size(); }

  // Distances from `source` to every state.
  std::vector<int> distances_from(std::size_t source) const {
    std::vector<int> dist(states_.size(), -1);
    std::deque<int> queue{static_cast<int>(source)};
    dist[source] = 0;
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop_front();
      for (int t : adj_[static_cast<std::size_t>(s)]) {
        if (dist[static_cast<std::size_t>(t)] >= 0) continue;
        dist[static_cast<std::size_t>(t)] = dist[static_cast<std::size_t>(s)] + 1;
        queue.push_back(t);
      }
    }
    return dist;
  }

 private:
  std::vector<Forest> states_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::size_t> trees_;
};

inline CallTreeNode to_call_tree_node(const Node& n) {
  CallTreeNode out(std::string(1, n.label));
  for (const Node& c : n.children) out.children.push_back(to_call_tree_node(c));
  return out;
}

inline CallTree to_call_tree(const Forest& f) {
  CallTree t;
  for (const Node& n : f) t.roots.push_back(to_call_tree_node(n));
  return t;
}

// --- Coloring ---------------------------------------------------------------------

inline bool has_traced_descendant(const CallTreeNode& n, const FunctionSet& traced) {
  for (const auto& c : n.children) {
    if (traced.count(c.function) || has_traced_descendant(c, traced)) return true;
  }
  return false;
}

inline const CallTreeNode* first_traced_below(const CallTreeNode& n, const FunctionSet& traced) {
  for (const auto& c : n.children) {
    if (traced.count(c.function)) return &c;
    if (const auto* d = first_traced_below(c, traced)) return d;
  }
  return nullptr;
}

// Colors by definition, one node at a time (quadratic).
inline CallTreeNode color_node(const CallTreeNode& n, const FunctionSet& traced,
                               FunctionSet& callstack) {
  CallTreeNode out(n.function);
  if (traced.count(n.function)) {
    out.color = Color::kWhite;
  } else if (has_traced_descendant(n, traced)) {
    out.color = Color::kBlue;
    callstack.insert(first_traced_below(n, traced)->function);
  } else {
    out.color = Color::kRed;
  }
  for (const auto& c : n.children) out.children.push_back(color_node(c, traced, callstack));
  return out;
}

// --- GCN ------------------------------------------------------------------------------

// Dense propagation from an explicit edge list.
inline Eigen::MatrixXd dense_gcn_layer(const Eigen::MatrixXd& h,
                                       const std::vector<std::pair<int, int>>& edges,
                                       const Eigen::MatrixXd& w, bool activate) {
  const auto n = h.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (const auto& [u, v] : edges) {
    a(u, v) += 1.0;
    a(v, u) += 1.0;
  }
  Eigen::VectorXd d = a.rowwise().sum();
  Eigen::MatrixXd norm(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) norm(i, j) = a(i, j) / std::sqrt(d(i) * d(j));
  }
  Eigen::MatrixXd out = norm * h * w;
  if (activate) out = out.cwiseMax(0.0);
  return out;
}

// Largest relative error between the analytic gradient and central finite
// differences (step eps) over every parameter. Entries where both are below
// `floor` in magnitude are compared against `floor` instead.
inline double max_gradient_rel_error(GcnModel model, std::span<const GraphBatch> graphs,
                                     std::span<const TrainingSample> samples,
                                     double eps = 1e-5, double floor = 1e-6) {
  Gradients g;
  loss_and_gradients(model, graphs, samples, &g);
  double worst = 0.0;
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + eps;
    const double up = loss_and_gradients(model, graphs, samples, nullptr);
    param = saved - eps;
    const double down = loss_and_gradients(model, graphs, samples, nullptr);
    param = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    for (Eigen::Index i = 0; i < model.layers[l].size(); ++i) {
      probe(model.layers[l].data()[i], g.layers[l].data()[i]);
    }
  }
  for (Eigen::Index i = 0; i < model.readout.size(); ++i) {
    probe(model.readout.data()[i], g.readout.data()[i]);
  }
  for (Eigen::Index i = 0; i < model.readout_bias.size(); ++i) {
    probe(model.readout_bias.data()[i], g.readout_bias.data()[i]);
  }
  return worst;
}

}  // namespace afetm::oracle

#endif  // AFETM_TESTS_ORACLES_HPP_
