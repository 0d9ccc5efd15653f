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

#include "afetm/injector.hpp"

#include <set>
#include <unordered_set>

namespace afetm {
namespace {

constexpr std::uint64_t kTagCampaign = 0x63616d706169676eULL;

}  // namespace

void validate_fault(const ProgramModel& model, const FaultSpec& fault) {
  const auto idx = model.index_of(fault.target);
  if (!idx) {
    throw ValidationError("fault target '" + fault.target +
                          "' is not a defined function");
  }
  const FunctionDef& def = model.function(*idx);
  const std::string where = "fault " + fault.key();
  if (fault.kind == FaultKind::kInputCorruption) {
    if (!fault.param_index) {
      throw ValidationError(where + ": input corruption needs param_index");
    }
    if (*fault.param_index < 0 || *fault.param_index >= def.params) {
      throw ValidationError(where + ": param_index " +
                            std::to_string(*fault.param_index) + " out of range for " +
                            std::to_string(def.params) + " parameters");
    }
  } else if (fault.param_index) {
    throw ValidationError(where + ": param_index applies to input corruption only");
  }
  if (fault.kind == FaultKind::kOutputCorruption) {
    if (def.returns < 1) throw ValidationError(where + ": function has no return value");
    if (fault.return_index &&
        (*fault.return_index < 0 || *fault.return_index >= def.returns)) {
      throw ValidationError(where + ": return_index " + std::to_string(*fault.return_index) +
                            " out of range for " + std::to_string(def.returns) +
                            " return values");
    }
  } else if (fault.return_index) {
    throw ValidationError(where + ": return_index applies to output corruption only");
  }
  if (fault.bit_index && (*fault.bit_index < 0 || *fault.bit_index > 63)) {
    throw ValidationError(where + ": bit_index must be in [0, 63]");
  }
  if (fault.kind == FaultKind::kIpPlusN && fault.skip < 1) {
    throw ValidationError(where + ": N must be positive");
  }
}

Execution apply_fault(const ProgramModel& model, const FaultSpec& fault,
                      std::string_view request_type, std::uint64_t seed) {
  validate_fault(model, fault);
  return execute_request(model, request_type, seed, &fault);
}

std::vector<FaultSpec> enumerate_fault_points(const ProgramModel& model,
                                              const WeightVector& weights) {
  if (weights.size() != model.function_count()) {
    throw ValidationError("weights do not match the model's functions");
  }
  std::vector<FaultSpec> out;
  for (std::size_t j = 0; j < model.function_count(); ++j) {
    if (!(weights[j] > 0.0)) continue;
    const FunctionDef& def = model.function(j);
    for (FaultKind k : {FaultKind::kIpPlusN, FaultKind::kCrash, FaultKind::kDeadlock}) {
      FaultSpec f;
      f.kind = k;
      f.target = def.id;
      out.push_back(f);
    }
    for (int p = 0; p < def.params; ++p) {
      FaultSpec f;
      f.kind = FaultKind::kInputCorruption;
      f.target = def.id;
      f.param_index = p;
      f.bit_index = 0;
      out.push_back(f);
    }
    for (int r = 0; r < def.returns; ++r) {
      FaultSpec f;
      f.kind = FaultKind::kOutputCorruption;
      f.target = def.id;
      f.site = FaultSite::kReturn;
      f.return_index = r;
      f.bit_index = 0;
      out.push_back(f);
    }
  }
  return out;
}

void Fddb::validate() const {
  if (normal.empty()) throw ValidationError("fddb: the normal tree set is empty");
  std::set<std::string> keys;
  for (const auto& r : records) {
    if (!keys.insert(r.fault.key()).second) {
      throw ValidationError("fddb: duplicate fault '" + r.fault.key() + "'");
    }
    if (!r.unactivated && r.fcts.empty()) {
      throw ValidationError("fddb: record '" + r.fault.key() + "' has no trees");
    }
  }
}

std::size_t Fddb::activated_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.unactivated ? 0 : 1;
  return n;
}

namespace {

struct Collected {
  std::vector<CallTree> trees;
  std::vector<ScheduledRequest> witnesses;
  std::size_t executions = 0;
  bool activated = false;
};

Collected collect(const ProgramModel& model, const WorkloadDef& workload,
                  const FaultSpec* fault, const CampaignOptions& options) {
  const std::uint64_t stream = substream(options.seed, {kTagCampaign});
  Collected out;
  std::unordered_set<std::string> seen;
  int streak = 0;
  for (std::size_t i = 0; i < options.max_runs; ++i) {
    const ScheduledRequest req = schedule_request(workload, stream, i);
    Execution e = execute_request(model, req.request_type, req.seed, fault);
    ++out.executions;
    if (fault != nullptr && !e.fault_activated) continue;
    out.activated = true;
    if (seen.insert(canonical_form(e.fct)).second) {
      out.trees.push_back(std::move(e.fct));
      out.witnesses.push_back(req);
      streak = 0;
    } else if (++streak >= options.saturation_k) {
      break;
    }
  }
  return out;
}

}  // namespace

Fddb run_campaign(const ProgramModel& model, std::string_view workload_id,
                  std::span<const FaultSpec> faults,
                  const CampaignOptions& options) {
  if (options.saturation_k < 1) {
    throw ValidationError("campaign: saturation_k must be at least 1");
  }
  if (options.max_runs < 1) {
    throw ValidationError("campaign: max_runs must be at least 1");
  }
  const WorkloadDef& workload = model.workload(workload_id);
  for (const auto& f : faults) validate_fault(model, f);

  Fddb db;
  db.fingerprint = model.fingerprint();
  db.workload = std::string(workload_id);
  Collected normal = collect(model, workload, nullptr, options);
  db.normal = std::move(normal.trees);
  db.normal_witnesses = std::move(normal.witnesses);

  db.records.resize(faults.size());
  parallel_for(faults.size(), options.jobs, [&](std::size_t i) {
    Collected c = collect(model, workload, &faults[i], options);
    FddbRecord& r = db.records[i];
    r.fault = faults[i];
    r.label = faults[i].label();
    r.fcts = std::move(c.trees);
    r.witnesses = std::move(c.witnesses);
    r.executions = c.executions;
    r.unactivated = !c.activated;
  });
  db.validate();
  return db;
}

}  // namespace afetm
