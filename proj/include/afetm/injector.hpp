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

// Fault injection campaigns and the fault diagnosis database (FDDB).

#ifndef AFETM_INJECTOR_HPP_
#define AFETM_INJECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afetm/calltree.hpp"
#include "afetm/fault.hpp"
#include "afetm/progmodel.hpp"

namespace afetm {

// Throws ValidationError when the target is unknown or an index is out of
// range for the target.
void validate_fault(const ProgramModel& model, const FaultSpec& fault);

// Faulted execution of one request.
Execution apply_fault(const ProgramModel& model, const FaultSpec& fault,
                      std::string_view request_type, std::uint64_t seed);

// For every function with a positive weight: IP+N, crash and deadlock at
// entry, one input corruption per parameter and one output corruption per
// returned value.
std::vector<FaultSpec> enumerate_fault_points(const ProgramModel& model,
                                              const WeightVector& weights);

struct CampaignOptions {
  int saturation_k = 3;         // consecutive activated runs with no new tree
  std::size_t max_runs = 200;   // executions per fault, activated or not
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct FddbRecord {
  FaultSpec fault;
  std::string label;
  std::vector<CallTree> fcts;                // distinct raw trees
  std::vector<ScheduledRequest> witnesses;   // first request producing each
  bool unactivated = false;
  std::size_t executions = 0;
};

struct Fddb {
  std::string fingerprint;
  std::string workload;
  std::vector<FddbRecord> records;
  std::vector<CallTree> normal;
  std::vector<ScheduledRequest> normal_witnesses;

  // Throws when the normal set is empty, an activated record has no trees,
  // or two records share a fault key.
  void validate() const;
  std::size_t activated_count() const;
};

// Runs the fault-free baseline and one campaign per fault. Each campaign
// replays the same request schedule and stops after `saturation_k`
// consecutive activated executions add no new canonical tree.
Fddb run_campaign(const ProgramModel& model, std::string_view workload_id,
                  std::span<const FaultSpec> faults,
                  const CampaignOptions& options);

}  // namespace afetm

#endif  // AFETM_INJECTOR_HPP_
