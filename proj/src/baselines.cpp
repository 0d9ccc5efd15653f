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

#include "afetm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

namespace afetm {

double gaussian_influence(double delta, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("gaussian influence needs sigma > 0");
  return std::exp(-(delta * delta) / (2.0 * sigma * sigma));
}

double gaussian_influence(const CallTree& t_r, const CallTree& t_db, double sigma) {
  return gaussian_influence(static_cast<double>(tree_edit_distance(t_r, t_db)), sigma);
}

std::size_t GaussianIndex::tree_count() const {
  std::size_t n = 0;
  for (const auto& entry : db) n += entry.second.size();
  return n;
}

GaussianIndex build_gaussian_index(
    std::vector<std::pair<std::string, std::vector<CallTree>>> db,
    const GaussianIndexOptions& options) {
  GaussianIndex index;
  index.db = std::move(db);
  std::vector<const CallTree*> all;
  for (const auto& entry : index.db) {
    for (const auto& t : entry.second) all.push_back(&t);
  }
  const std::size_t n = all.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const std::size_t total = n < 2 ? 0 : n * (n - 1) / 2;
  if (total <= options.max_pairs) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
  } else {
    Rng rng(substream(options.seed, {0x7369676d61ULL}));
    while (pairs.size() < options.max_pairs) {
      const std::size_t i = uniform_index(rng, n);
      const std::size_t j = uniform_index(rng, n);
      if (i != j) pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::vector<double> d(pairs.size());
  parallel_for(pairs.size(), options.jobs, [&](std::size_t k) {
    d[k] = static_cast<double>(tree_edit_distance(*all[pairs[k].first], *all[pairs[k].second]));
  });
  index.pairs_used = d.size();
  double sigma = 0.0;
  if (!d.empty()) {
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    sigma = std::sqrt(var / static_cast<double>(d.size()));
  }
  if (sigma > 0.0) {
    index.sigma = sigma;
  } else {
    index.sigma = 1.0;
    index.sigma_degenerate = true;
  }
  return index;
}

GaussianIndex build_gaussian_index(const Fddb& fddb, const TracePlan& plan,
                                   const GaussianIndexOptions& options) {
  std::map<std::string, std::vector<CallTree>> by_label;
  std::map<std::string, std::unordered_set<std::string>> seen;
  auto add = [&](const std::string& label, const CallTree& fct) {
    CallTree view = training_view(fct, plan.traced);
    if (view.empty()) return;
    if (seen[label].insert(canonical_form(view)).second) {
      by_label[label].push_back(std::move(view));
    }
  };
  const std::string normal(kNormalLabel);
  for (const auto& t : fddb.normal) add(normal, t);
  for (const auto& r : fddb.records) {
    if (r.unactivated) continue;
    for (const auto& t : r.fcts) add(r.label, t);
  }
  std::vector<std::pair<std::string, std::vector<CallTree>>> db;
  if (auto it = by_label.find(normal); it != by_label.end()) {
    db.emplace_back(normal, std::move(it->second));
    by_label.erase(it);
  }
  for (auto& [label, trees] : by_label) db.emplace_back(label, std::move(trees));
  return build_gaussian_index(std::move(db), options);
}

Diagnosis afct_gdc_diagnose(const CallTree& afct, const GaussianIndex& index) {
  if (index.db.empty()) throw ValidationError("gdc: empty FDDB index");
  std::vector<std::string> labels;
  std::vector<double> scores;
  double best_normal = 0.0;
  double best_fault = 0.0;
  std::string best_fault_label;
  for (const auto& [label, trees] : index.db) {
    double best = 0.0;
    for (const auto& t : trees) best = std::max(best, gaussian_influence(afct, t, index.sigma));
    labels.push_back(label);
    scores.push_back(best);
    if (label == kNormalLabel) {
      best_normal = std::max(best_normal, best);
    } else if (best > best_fault || (best == best_fault && label < best_fault_label) ||
               best_fault_label.empty()) {
      best_fault = best;
      best_fault_label = label;
    }
  }
  Diagnosis d = make_diagnosis(labels, scores);
  d.error_detected = !best_fault_label.empty() && best_fault > best_normal;
  d.located.reset();
  if (d.error_detected) {
    for (const auto& [label, score] : d.ranked) {
      if (label != kNormalLabel) {
        d.located = label_function(label);
        break;
      }
    }
  }
  return d;
}

EdcResult fct_edc_detect(const CallTree& fct_run, std::span<const CallTree> normal_fcts,
                         double threshold) {
  if (normal_fcts.empty()) throw ValidationError("edc: empty normal tree set");
  if (!(threshold >= 0.0)) throw ValidationError("edc: threshold must be non-negative");
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::size_t nearest = 0;
  for (std::size_t i = 0; i < normal_fcts.size(); ++i) {
    const std::size_t d = tree_edit_distance(fct_run, normal_fcts[i]);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  EdcResult r;
  r.distance = best;
  r.error = static_cast<double>(best) > threshold;
  if (!r.error) return r;
  const auto run = preorder(fct_run);
  const auto ref = preorder(normal_fcts[nearest]);
  const std::size_t common = std::min(run.size(), ref.size());
  std::size_t k = 0;
  while (k < common && run[k] == ref[k]) ++k;
  if (k < ref.size()) {
    r.located = ref[k];
  } else if (k < run.size()) {
    r.located = run[k];
  }
  return r;
}

LogModel derive_log_model(const ProgramModel& model) {
  LogModel m;
  m.loggers.insert(model.spec().loggers.begin(), model.spec().loggers.end());
  return m;
}

LogResult log_oracle_diagnose(const CallTree& faulted_fct, std::string_view fault_target,
                              const LogModel& log_model) {
  LogResult r;
  const auto order = preorder(faulted_fct);
  auto site = std::find(order.begin(), order.end(), fault_target);
  if (site == order.end()) return r;
  auto log = std::find_if(site + 1, order.end(),
                          [&](const FunctionId& f) { return log_model.loggers.contains(f); });
  if (log == order.end()) return r;
  r.detected = true;
  r.logger = *log;
  r.fld = static_cast<std::size_t>(log - site);
  return r;
}

}  // namespace afetm
