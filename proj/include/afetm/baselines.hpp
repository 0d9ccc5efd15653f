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

// Comparison methods: Gaussian influence over the FDDB (AFCT-GDC), full
// tracking with edit distance to the normal trees (FCT-EDC), and an
// idealized error-log detector.

#ifndef AFETM_BASELINES_HPP_
#define AFETM_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "afetm/calltree.hpp"
#include "afetm/diagnoser.hpp"
#include "afetm/injector.hpp"
#include "afetm/progmodel.hpp"

namespace afetm {

// exp(-delta^2 / (2 sigma^2)). Throws when sigma <= 0.
double gaussian_influence(double delta, double sigma);
double gaussian_influence(const CallTree& t_r, const CallTree& t_db,
                          double sigma);

struct GaussianIndex {
  std::vector<std::pair<std::string, std::vector<CallTree>>> db;
  double sigma = 1.0;
  bool sigma_degenerate = false;  // all distances were 0; sigma forced to 1
  std::size_t pairs_used = 0;

  std::size_t tree_count() const;
};

struct GaussianIndexOptions {
  // Pairwise distances are sampled beyond this many pairs.
  std::size_t max_pairs = 20000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

// Labels with their distinct trees; sigma is the standard deviation of the
// pairwise edit distances across all trees.
GaussianIndex build_gaussian_index(
    std::vector<std::pair<std::string, std::vector<CallTree>>> db,
    const GaussianIndexOptions& options = {});

// Masked views of the FDDB (normal plus activated records).
GaussianIndex build_gaussian_index(const Fddb& fddb, const TracePlan& plan,
                                   const GaussianIndexOptions& options = {});

// Per label, the maximum influence over its trees; labels ranked by
// influence with ties broken by label. Error declared when the best fault
// label beats the best normal influence. Throws on an empty index.
Diagnosis afct_gdc_diagnose(const CallTree& afct, const GaussianIndex& index);

struct EdcResult {
  bool error = false;
  std::optional<FunctionId> located;
  std::size_t distance = 0;  // to the nearest normal tree
};

// Throws on an empty normal set. A negative threshold is rejected.
EdcResult fct_edc_detect(const CallTree& fct_run,
                         std::span<const CallTree> normal_fcts,
                         double threshold);

struct LogModel {
  FunctionSet loggers;
};

LogModel derive_log_model(const ProgramModel& model);

struct LogResult {
  bool detected = false;
  std::optional<FunctionId> logger;
  std::optional<std::size_t> fld;
};

// Detected iff a logger occurs in the preorder after the first invocation of
// the faulty function; FLD is the preorder distance between the two.
LogResult log_oracle_diagnose(const CallTree& faulted_fct,
                              std::string_view fault_target,
                              const LogModel& log_model);

}  // namespace afetm

#endif  // AFETM_BASELINES_HPP_
