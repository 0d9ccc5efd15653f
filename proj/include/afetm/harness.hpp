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

// Metrics and end-to-end experiment orchestration: offline campaign and
// training, online adaptive tracing and diagnosis by every method.

#ifndef AFETM_HARNESS_HPP_
#define AFETM_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afetm/baselines.hpp"
#include "afetm/calltree.hpp"
#include "afetm/diagnoser.hpp"
#include "afetm/injector.hpp"
#include "afetm/progmodel.hpp"
#include "afetm/selector.hpp"

namespace afetm {

inline constexpr const char* kMethodAfetm = "afetm";
inline constexpr const char* kMethodGdc = "afct_gdc";
inline constexpr const char* kMethodEdc = "fct_edc";
inline constexpr const char* kMethodLog = "log";

// --- Metrics ----------------------------------------------------------------

// Percentages. Both throw when n_injection is zero.
double edr(std::size_t n_error, std::size_t n_injection);
double flr(std::size_t n_location, std::size_t n_injection);
// Mean of the distances; throws when there are none.
double fld_summary(std::span<const std::size_t> distances);
// Percentage growth; throws when t_before <= 0.
double rtgr(double t_before, double t_after);

struct FddTiming {
  std::int64_t construction_ns = 0;
  std::int64_t inference_ns = 0;

  std::int64_t total_ns() const { return construction_ns + inference_ns; }
  double total_ms() const { return static_cast<double>(total_ns()) / 1e6; }
};

// Times AFCT construction from the trace and the diagnosis of that AFCT.
FddTiming measure_fdd(std::span<const TraceEvent> trace,
                      const std::function<Diagnosis(const CallTree&)>& method,
                      CallTree* afct, std::optional<Diagnosis>* diagnosis);

// Abstract response time of a request stream with and without tracing:
// t_before sums cost_per_call over invocations, t_after adds event_cost per
// event of a traced function.
struct TracingCost {
  double t_before = 0.0;
  double t_after = 0.0;
  std::size_t traced_events = 0;
};

TracingCost tracing_cost(const ProgramModel& model,
                         std::span<const ScheduledRequest> requests,
                         const FunctionSet& traced, double event_cost);

// --- Experiments --------------------------------------------------------------

struct ExperimentConfig {
  std::filesystem::path model;
  std::string workload;
  double budget_fraction = 0.1;
  double sampling_seconds = kDefaultSamplingSeconds;
  MmasParams mmas;
  TrainingConfig gcn;
  std::vector<std::string> methods = {kMethodAfetm, kMethodGdc, kMethodEdc,
                                      kMethodLog};
  std::uint64_t seed = 0;
  int saturation_k = 3;
  std::size_t max_runs = 200;
  double holdout_fraction = 0.2;
  double timeout_seconds = 1.0;  // hang detection budget
  double event_cost = 1.0;
  double edc_threshold = 0.0;
  std::size_t gdc_max_pairs = 20000;
  std::vector<double> rtgr_budgets = {0.1, 0.3, 0.5};
  int rtgr_seeds = 10;
  unsigned jobs = 1;

  void validate() const;
};

// Reads a config file; a relative model path is resolved against the
// config's directory. Unknown keys are rejected.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ExperimentRecord {
  std::string fault;   // fault key
  std::string label;
  FunctionId target;
  std::string split;   // "train" or "holdout"
  std::string method;
  std::string request;
  std::uint64_t seed = 0;
  bool detected = false;
  std::optional<FunctionId> located;
  bool located_top1 = false;
  bool located_top3 = false;
  // GDC only: the AFCT equals a stored tree and every label storing that
  // tree names the injected function.
  bool exact_match = false;
  std::optional<std::size_t> fld;
  FddTiming fdd;
};

struct MethodSummary {
  std::string method;
  std::string split;
  std::size_t n_injection = 0;
  std::size_t n_error = 0;
  std::size_t n_location = 0;
  std::size_t n_location_top3 = 0;
  double edr = 0.0;
  double flr = 0.0;
  double flr_top3 = 0.0;
  std::optional<double> fld;
  double rtgr = 0.0;
  double fdd_ms = 0.0;               // mean per experiment
  double construction_ms = 0.0;
  double inference_ms = 0.0;
};

struct RtgrPoint {
  std::string setting;  // "P=0.1" ... or "full"
  double budget = 1.0;
  std::uint64_t seed = 0;
  double coverage = 0.0;
  std::size_t traced_functions = 0;
  TracingCost cost;
  double rtgr = 0.0;
};

struct CampaignResult {
  std::vector<ExperimentRecord> records;
  std::vector<MethodSummary> summaries;
  std::vector<RtgrPoint> rtgr_points;
  SelectionSolution selection;
  FunctionSet traced;
  FunctionSet callstack;
  std::size_t fault_count = 0;
  std::size_t train_faults = 0;
  std::size_t holdout_faults = 0;
  std::size_t fddb_records = 0;
  std::size_t fddb_trees = 0;
  double gcn_final_loss = 0.0;
  int gcn_epochs = 0;
  double gdc_sigma = 0.0;
  std::int64_t train_ns = 0;
  long peak_rss_kb = 0;

  const MethodSummary* summary(std::string_view method,
                               std::string_view split) const;
};

// Simulated RTGR for each budget (and full tracking) over `seeds` runs.
std::vector<RtgrPoint> rtgr_sweep(const ProgramModel& model,
                                  std::string_view workload_id,
                                  std::span<const double> budgets, int seeds,
                                  const MmasParams& mmas,
                                  double sampling_seconds, double event_cost,
                                  std::uint64_t seed);

CampaignResult run_experiment(const ExperimentConfig& config,
                              const ProgramModel& model);

// Writes report.json, report.csv, timing.json and plots/*.csv under
// out_dir. report.json holds no wall-clock data, so equal seeds give equal
// bytes.
void write_reports(const CampaignResult& result,
                   const ExperimentConfig& config,
                   const std::filesystem::path& out_dir);

// Peak resident set size of this process in KiB (0 if unavailable).
long peak_rss_kb();

}  // namespace afetm

#endif  // AFETM_HARNESS_HPP_
