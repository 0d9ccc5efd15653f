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

// A deterministic synthetic target program. Functions are control-flow
// graphs of basic blocks; blocks call other functions and pick a successor
// with a pure hash of the request, the input variant and the invocation's
// data state, so corrupted data deterministically changes control flow.

#ifndef AFETM_PROGMODEL_HPP_
#define AFETM_PROGMODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "afetm/calltree.hpp"
#include "afetm/common.hpp"
#include "afetm/fault.hpp"

namespace afetm {

struct BasicBlock {
  int label = 0;
  std::vector<int> successors;
  std::vector<FunctionId> calls;
  // Successor taken when the invocation holds corrupted data.
  std::optional<int> on_error;
  // Successor taken when a callee handled an error and reports failure.
  // Without it such a failure also takes on_error.
  std::optional<int> on_failure;
  // Successor forced for a given request type.
  std::map<std::string, int> by_request;
};

struct FunctionDef {
  FunctionId id;
  std::vector<BasicBlock> blocks;  // blocks.front() is the entry block
  int params = 0;
  double cost_per_call = 1.0;  // abstract time units
  int returns = 1;             // number of values returned to the caller
};

struct WorkloadDef {
  std::string id;
  std::vector<std::pair<std::string, double>> mix;  // request type -> weight
  double rate = 1.0;                                // requests per second
};

// Plain data as read from a program-spec file.
struct ProgramSpec {
  std::vector<FunctionDef> functions;
  FunctionId entry;
  std::vector<WorkloadDef> workloads;
  std::uint64_t rng_seed = 0;
  int max_depth = 64;          // recursion bound on the call stack
  int variants = 4;            // distinct inputs per request type
  int max_block_steps = 256;   // block visits per invocation
  std::vector<FunctionId> loggers;  // error-logging functions
};

// Validated, indexed program model. Immutable after construction and safe
// to share across threads.
class ProgramModel {
 public:
  // Throws ValidationError naming the violated invariant.
  explicit ProgramModel(ProgramSpec spec);

  const ProgramSpec& spec() const { return spec_; }
  const std::vector<FunctionDef>& functions() const { return spec_.functions; }
  std::size_t function_count() const { return spec_.functions.size(); }
  const FunctionDef& function(std::size_t i) const { return spec_.functions[i]; }
  const FunctionDef& function(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  std::size_t entry_index() const { return entry_; }

  const WorkloadDef& workload(std::string_view id) const;
  // Request types in first-declared order across workloads.
  const std::vector<std::string>& request_types() const { return requests_; }
  bool has_request_type(std::string_view r) const;

  // Position of `label` inside function i's block list.
  std::size_t block_index(std::size_t fn, int label) const;
  // Callee indices of block b of function fn, aligned with `calls`.
  const std::vector<std::size_t>& callees(std::size_t fn, std::size_t b) const;

  // Hex digest of the canonical model content.
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  ProgramSpec spec_;
  std::size_t entry_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::unordered_map<int, std::size_t>> block_index_;
  std::vector<std::vector<std::vector<std::size_t>>> callees_;
  std::vector<std::string> requests_;
  std::string fingerprint_;
};

ProgramModel load_program_spec(const std::filesystem::path& path);

// --- Execution --------------------------------------------------------------

enum class Outcome { kCompleted, kCrashed, kHang };

std::string_view to_string(Outcome o);

struct Execution {
  CallTree fct;                     // ground truth, one node per invocation
  std::vector<TraceEvent> events;   // full tracking, in time order
  Outcome outcome = Outcome::kCompleted;
  bool fault_activated = false;
  double cost = 0.0;                // sum of cost_per_call over invocations
  std::vector<std::uint32_t> invocations;  // per function
};

// Runs one request. Deterministic in (model, request_type, seed, fault).
// Throws ValidationError for an undeclared request type and Error when the
// recursion bound trips (naming the cycle).
Execution execute_request(const ProgramModel& model,
                          std::string_view request_type, std::uint64_t seed,
                          const FaultSpec* fault = nullptr);

// Input variant a seed selects; requests with equal (type, variant) and no
// fault follow the same path.
int request_variant(const ProgramModel& model, std::uint64_t seed);

// --- Workload sampling --------------------------------------------------------

struct ScheduledRequest {
  std::string request_type;
  std::uint64_t seed = 0;
};

// The i-th request of a workload stream, drawn from the request mix.
ScheduledRequest schedule_request(const WorkloadDef& workload,
                                  std::uint64_t stream_seed, std::size_t i);

// The requests a workload issues over `duration` seconds:
// round(rate * duration) entries.
std::vector<ScheduledRequest> workload_requests(const WorkloadDef& workload,
                                                double duration,
                                                std::uint64_t seed);

using WeightVector = std::vector<double>;

inline constexpr double kDefaultSamplingSeconds = 10.0;

// w_j = invocations of f_j over the simulated window / duration.
WeightVector sample_frequencies(const ProgramModel& model,
                                std::string_view workload_id, double duration,
                                std::uint64_t seed);

// --- Synthetic models for property tests ----------------------------------------

struct RandomProgramOptions {
  int min_functions = 3;
  int max_functions = 30;
  int max_blocks = 4;
  int max_calls_per_block = 2;
  int request_types = 2;
  double branch_probability = 0.5;
};

// Random model with an acyclic call graph (callees always have a larger
// index than the caller), so every execution terminates.
ProgramModel random_program(std::uint64_t seed,
                            const RandomProgramOptions& options = {});

}  // namespace afetm

#endif  // AFETM_PROGMODEL_HPP_
