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

#include "afetm/progmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "afetm/json_io.hpp"

namespace afetm {
namespace {

// Substream tags.
constexpr std::uint64_t kTagVariant = 0x76617269616e74ULL;
constexpr std::uint64_t kTagRootParam = 0x726f6f74ULL;
constexpr std::uint64_t kTagMix = 0x6d6978ULL;
constexpr std::uint64_t kTagSeed = 0x73656564ULL;
constexpr std::uint64_t kTagReturn = 0x726574ULL;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kCompleted:
      return "completed";
    case Outcome::kCrashed:
      return "crashed";
    case Outcome::kHang:
      return "hang";
  }
  return "completed";
}

// --- ProgramModel -------------------------------------------------------------

ProgramModel::ProgramModel(ProgramSpec spec) : spec_(std::move(spec)) {
  if (spec_.functions.empty()) {
    throw ValidationError("program: at least one function is required");
  }
  if (spec_.max_depth < 1) {
    throw ValidationError("program: max_depth must be at least 1");
  }
  if (spec_.variants < 1) {
    throw ValidationError("program: variants must be at least 1");
  }
  if (spec_.max_block_steps < 1) {
    throw ValidationError("program: max_block_steps must be at least 1");
  }

  for (std::size_t i = 0; i < spec_.functions.size(); ++i) {
    const auto& f = spec_.functions[i];
    if (f.id.empty()) throw ValidationError("program: empty function id");
    if (!index_.emplace(f.id, i).second) {
      throw ValidationError("program: duplicate function id '" + f.id + "'");
    }
  }
  auto entry = index_.find(spec_.entry);
  if (entry == index_.end()) {
    throw ValidationError("program: entry function '" + spec_.entry +
                          "' is not defined");
  }
  entry_ = entry->second;

  FunctionSet request_set;
  std::set<std::string> workload_ids;
  for (const auto& w : spec_.workloads) {
    if (!workload_ids.insert(w.id).second) {
      throw ValidationError("program: duplicate workload id '" + w.id + "'");
    }
    if (w.mix.empty()) {
      throw ValidationError("workload '" + w.id + "': empty request mix");
    }
    if (!(w.rate > 0.0) || !std::isfinite(w.rate)) {
      throw ValidationError("workload '" + w.id + "': rate must be positive");
    }
    double total = 0.0;
    for (const auto& [req, weight] : w.mix) {
      if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw ValidationError("workload '" + w.id + "': weight of '" + req +
                              "' must be non-negative");
      }
      total += weight;
      if (request_set.insert(req).second) requests_.push_back(req);
    }
    if (!(total > 0.0)) {
      throw ValidationError("workload '" + w.id + "': mix weights sum to 0");
    }
  }

  block_index_.resize(spec_.functions.size());
  callees_.resize(spec_.functions.size());
  for (std::size_t i = 0; i < spec_.functions.size(); ++i) {
    const auto& f = spec_.functions[i];
    const std::string where = "function '" + f.id + "'";
    if (f.blocks.empty()) throw ValidationError(where + ": has no blocks");
    if (f.params < 0) throw ValidationError(where + ": negative params");
    if (f.returns < 0) throw ValidationError(where + ": negative return count");
    if (!(f.cost_per_call >= 0.0) || !std::isfinite(f.cost_per_call)) {
      throw ValidationError(where + ": cost must be non-negative");
    }
    auto& labels = block_index_[i];
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
      if (!labels.emplace(f.blocks[b].label, b).second) {
        throw ValidationError(where + ": duplicate block label " +
                              std::to_string(f.blocks[b].label));
      }
    }
    callees_[i].resize(f.blocks.size());
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
      const auto& blk = f.blocks[b];
      const std::string bwhere = where + " block " + std::to_string(blk.label);
      auto check_label = [&](int label, const char* what) {
        if (!labels.contains(label)) {
          throw ValidationError(bwhere + ": " + what + " " +
                                std::to_string(label) +
                                " is not a block of the function");
        }
      };
      for (int s : blk.successors) check_label(s, "successor");
      if (blk.on_error) check_label(*blk.on_error, "on_error target");
      if (blk.on_failure) check_label(*blk.on_failure, "on_failure target");
      for (const auto& [req, label] : blk.by_request) {
        check_label(label, "by_request target");
        if (!request_set.contains(req)) {
          throw ValidationError(bwhere + ": by_request names undeclared "
                                "request type '" + req + "'");
        }
      }
      for (const auto& callee : blk.calls) {
        auto it = index_.find(callee);
        if (it == index_.end()) {
          throw ValidationError(bwhere + ": call to undefined function '" +
                                callee + "'");
        }
        callees_[i][b].push_back(it->second);
      }
    }
  }
  for (const auto& logger : spec_.loggers) {
    if (!index_.contains(logger)) {
      throw ValidationError("program: logger '" + logger +
                            "' is not a defined function");
    }
  }
  fingerprint_ = hex64(hash_string(to_json(spec_).dump()));
}

const FunctionDef& ProgramModel::function(std::string_view id) const {
  auto i = index_of(id);
  if (!i) {
    throw ValidationError("unknown function '" + std::string(id) + "'");
  }
  return spec_.functions[*i];
}

std::optional<std::size_t> ProgramModel::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const WorkloadDef& ProgramModel::workload(std::string_view id) const {
  for (const auto& w : spec_.workloads) {
    if (w.id == id) return w;
  }
  throw ValidationError("unknown workload '" + std::string(id) + "'");
}

bool ProgramModel::has_request_type(std::string_view r) const {
  return std::find(requests_.begin(), requests_.end(), r) != requests_.end();
}

std::size_t ProgramModel::block_index(std::size_t fn, int label) const {
  return block_index_[fn].at(label);
}

const std::vector<std::size_t>& ProgramModel::callees(std::size_t fn,
                                                      std::size_t b) const {
  return callees_[fn][b];
}

ProgramModel load_program_spec(const std::filesystem::path& path) {
  return ProgramModel(program_spec_from_json(read_json_file(path)));
}

// --- Execution --------------------------------------------------------------

namespace {

struct Value {
  std::uint64_t bits = 0;
  bool tainted = false;  // derived from corrupted data
  bool failed = false;   // an error was handled below and reported upward
};

class Executor {
 public:
  Executor(const ProgramModel& model, std::string_view request,
           std::uint64_t seed, const FaultSpec* fault)
      : model_(model), request_(request), fault_(fault) {
    exec_.invocations.assign(model.function_count(), 0);
    request_key_ = substream(model.spec().rng_seed,
                             {hash_string(request),
                              static_cast<std::uint64_t>(
                                  request_variant(model, seed))});
    if (fault_ != nullptr) {
      auto t = model.index_of(fault_->target);
      if (!t) {
        throw ValidationError("fault target '" + fault_->target +
                              "' is not a defined function");
      }
      target_ = *t;
    }
  }

  Execution run() {
    const std::size_t entry = model_.entry_index();
    const auto& def = model_.function(entry);
    std::vector<Value> params(static_cast<std::size_t>(def.params));
    for (std::size_t p = 0; p < params.size(); ++p) {
      params[p].bits = hash_combine(hash_combine(request_key_, kTagRootParam), p);
    }
    CallTreeNode root(def.id);
    invoke(entry, std::move(params), root);
    exec_.fct = CallTree(std::move(root));
    return std::move(exec_);
  }

 private:
  [[noreturn]] void recursion_error(std::size_t fn) const {
    auto first = std::find(stack_.begin(), stack_.end(), fn);
    std::string msg;
    if (first != stack_.end()) {
      msg = "unbounded recursion: cycle ";
      for (auto it = first; it != stack_.end(); ++it) {
        msg += model_.function(*it).id + " -> ";
      }
      msg += model_.function(fn).id;
    } else {
      msg = "call chain through '" + model_.function(fn).id + "'";
    }
    throw Error(msg + " exceeds max_depth " +
                std::to_string(model_.spec().max_depth));
  }

  void stop(Outcome o) {
    stopped_ = true;
    exec_.outcome = o;
  }

  Value invoke(std::size_t fn, std::vector<Value> params, CallTreeNode& node) {
    if (stack_.size() >= static_cast<std::size_t>(model_.spec().max_depth)) {
      recursion_error(fn);
    }
    const FunctionDef& def = model_.function(fn);
    const std::optional<FunctionId> caller =
        path_.empty() ? std::nullopt : std::optional<FunctionId>(path_.back());
    stack_.push_back(fn);
    path_.push_back(def.id);
    exec_.events.push_back(TraceEvent{exec_.events.size(), def.id, caller, path_});
    ++exec_.invocations[fn];
    exec_.cost += def.cost_per_call;
    Value ret = body(fn, def, std::move(params), node);
    stack_.pop_back();
    path_.pop_back();
    return ret;
  }

  Value body(std::size_t fn, const FunctionDef& def, std::vector<Value> params,
             CallTreeNode& node) {
    const bool is_target = fault_ != nullptr && fn == target_;
    int skip = 0;
    bool taint_return = false;
    if (is_target) {
      exec_.fault_activated = true;
      const bool at_entry = fault_->site == FaultSite::kEntry;
      switch (fault_->kind) {
        case FaultKind::kCrash:
          if (at_entry) {
            stop(Outcome::kCrashed);
            return {};
          }
          break;
        case FaultKind::kDeadlock:
          if (at_entry) {
            stop(Outcome::kHang);
            return {};
          }
          break;
        case FaultKind::kInputCorruption: {
          auto& v = params.at(static_cast<std::size_t>(fault_->param_index.value_or(0)));
          v.bits ^= 1ULL << fault_->bit_index.value_or(0);
          v.tainted = true;
          break;
        }
        case FaultKind::kIpPlusN:
          if (at_entry) skip = fault_->skip;
          taint_return = true;
          break;
        case FaultKind::kOutputCorruption:
          break;
      }
    }

    std::uint64_t state = hash_string(def.id);
    bool tainted = false;
    bool failed = false;
    bool handled = false;
    for (const auto& p : params) {
      state = hash_combine(state, p.bits);
      tainted = tainted || p.tainted;
    }
    std::uint64_t acc = state;
    std::uint64_t calls_made = 0;
    std::size_t b = 0;
    int steps = 0;
    while (true) {
      const BasicBlock& blk = def.blocks[b];
      const auto& targets = model_.callees(fn, b);
      for (std::size_t k = 0; k < targets.size(); ++k) {
        if (skip > 0) {
          --skip;
          continue;
        }
        const std::size_t callee = targets[k];
        const FunctionDef& cdef = model_.function(callee);
        std::vector<Value> args(static_cast<std::size_t>(cdef.params));
        for (std::size_t p = 0; p < args.size(); ++p) {
          args[p].bits = hash_combine(
              hash_combine(hash_combine(acc, callee), p), calls_made);
          args[p].tainted = tainted;
        }
        ++calls_made;
        CallTreeNode child(cdef.id);
        const Value r = invoke(callee, std::move(args), child);
        node.children.push_back(std::move(child));
        if (stopped_) return {};
        if (cdef.returns) {
          acc = hash_combine(acc, r.bits);
          tainted = tainted || r.tainted;
          failed = failed || r.failed;
        }
      }
      if (blk.successors.empty()) break;
      if (++steps >= model_.spec().max_block_steps) break;
      b = model_.block_index(fn, next_block(blk, acc, tainted, failed, steps, handled));
    }

    if (is_target && fault_->site == FaultSite::kReturn) {
      if (fault_->kind == FaultKind::kCrash) {
        stop(Outcome::kCrashed);
        return {};
      }
      if (fault_->kind == FaultKind::kDeadlock) {
        stop(Outcome::kHang);
        return {};
      }
    }
    // A function that took an error path reports failure instead of passing
    // the corrupted data on.
    Value ret{hash_combine(acc, kTagReturn), (tainted && !handled) || taint_return,
              failed || handled};
    if (is_target && fault_->kind == FaultKind::kOutputCorruption) {
      // Returned values share the word in 8-bit lanes.
      const int bit = fault_->bit_index.value_or(0) + 8 * fault_->return_index.value_or(0);
      ret.bits ^= 1ULL << (bit % 64);
      ret.tainted = true;
    }
    return ret;
  }

  int next_block(const BasicBlock& blk, std::uint64_t acc, bool tainted,
                 bool failed, int steps, bool& handled) const {
    if (tainted && blk.on_error) {
      handled = true;
      return *blk.on_error;
    }
    if (failed && (blk.on_failure || blk.on_error)) {
      handled = true;
      return blk.on_failure ? *blk.on_failure : *blk.on_error;
    }
    if (auto it = blk.by_request.find(request_); it != blk.by_request.end()) {
      return it->second;
    }
    // The error successor is only taken on corrupted data, unless it is the
    // only way out.
    std::vector<int> choices;
    for (int s : blk.successors) {
      if (blk.on_error && s == *blk.on_error) continue;
      if (blk.on_failure && s == *blk.on_failure) continue;
      choices.push_back(s);
    }
    if (choices.empty()) choices = blk.successors;
    const std::uint64_t h =
        hash_combine(hash_combine(acc, static_cast<std::uint64_t>(steps)),
                     static_cast<std::uint64_t>(blk.label));
    return choices[h % choices.size()];
  }

  const ProgramModel& model_;
  std::string request_;
  const FaultSpec* fault_;
  std::size_t target_ = 0;
  std::uint64_t request_key_ = 0;
  std::vector<std::size_t> stack_;
  std::vector<FunctionId> path_;
  bool stopped_ = false;
  Execution exec_;
};

}  // namespace

int request_variant(const ProgramModel& model, std::uint64_t seed) {
  const std::uint64_t h = substream(model.spec().rng_seed, {kTagVariant, seed});
  return static_cast<int>(h % static_cast<std::uint64_t>(model.spec().variants));
}

Execution execute_request(const ProgramModel& model,
                          std::string_view request_type, std::uint64_t seed,
                          const FaultSpec* fault) {
  if (!model.has_request_type(request_type)) {
    throw ValidationError("undeclared request type '" +
                          std::string(request_type) + "'");
  }
  return Executor(model, request_type, seed, fault).run();
}

// --- Workload sampling --------------------------------------------------------

ScheduledRequest schedule_request(const WorkloadDef& workload,
                                  std::uint64_t stream_seed, std::size_t i) {
  double total = 0.0;
  for (const auto& entry : workload.mix) total += entry.second;
  const double u = to_unit(substream(stream_seed, {kTagMix, i})) * total;
  double cumulative = 0.0;
  const std::string* chosen = nullptr;
  for (const auto& [req, weight] : workload.mix) {
    if (weight <= 0.0) continue;
    chosen = &req;
    cumulative += weight;
    if (u < cumulative) break;
  }
  return ScheduledRequest{*chosen, substream(stream_seed, {kTagSeed, i})};
}

std::vector<ScheduledRequest> workload_requests(const WorkloadDef& workload,
                                                double duration,
                                                std::uint64_t seed) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ValidationError("sampling duration must be positive");
  }
  const auto count = static_cast<std::size_t>(std::llround(workload.rate * duration));
  std::vector<ScheduledRequest> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(schedule_request(workload, seed, i));
  }
  return out;
}

WeightVector sample_frequencies(const ProgramModel& model,
                                std::string_view workload_id, double duration,
                                std::uint64_t seed) {
  const WorkloadDef& w = model.workload(workload_id);
  const auto requests = workload_requests(w, duration, seed);
  std::vector<std::uint64_t> counts(model.function_count(), 0);
  for (const auto& r : requests) {
    const Execution e = execute_request(model, r.request_type, r.seed);
    for (std::size_t j = 0; j < counts.size(); ++j) counts[j] += e.invocations[j];
  }
  WeightVector weights(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    weights[j] = static_cast<double>(counts[j]) / duration;
  }
  return weights;
}

// --- Synthetic models -----------------------------------------------------------

ProgramModel random_program(std::uint64_t seed,
                            const RandomProgramOptions& options) {
  Rng rng(substream(seed, {0x72616e646f6dULL}));
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(uniform_index(
                    rng, static_cast<std::uint64_t>(hi - lo + 1)));
  };
  ProgramSpec spec;
  spec.rng_seed = seed;
  spec.variants = pick(1, 4);
  const int n = pick(options.min_functions, options.max_functions);
  for (int i = 0; i < n; ++i) {
    FunctionDef f;
    f.id = "f" + std::to_string(i);
    f.params = pick(0, 2);
    f.cost_per_call = 0.5 + uniform01(rng);
    f.returns = uniform01(rng) < 0.8 ? 1 : 0;
    const int blocks = pick(1, options.max_blocks);
    for (int b = 0; b < blocks; ++b) {
      BasicBlock blk;
      blk.label = b * 10;
      if (b + 1 < blocks) {
        blk.successors.push_back((b + 1) * 10);
        for (int s = b + 2; s < blocks; ++s) {
          if (uniform01(rng) < options.branch_probability) {
            blk.successors.push_back(s * 10);
          }
        }
        if (blk.successors.size() > 1 && uniform01(rng) < 0.3) {
          blk.on_error = blk.successors.back();
        }
      }
      // Forward calls only keep the call graph acyclic.
      if (i + 1 < n) {
        const int calls = pick(0, options.max_calls_per_block);
        for (int c = 0; c < calls; ++c) {
          // Skewed toward the far end, which keeps call chains short and the
          // trees small.
          const int span = n - 1 - i;
          const int jump = static_cast<int>(std::sqrt(uniform01(rng)) * span);
          blk.calls.push_back("f" + std::to_string(i + 1 + std::min(jump, span - 1)));
        }
      }
      f.blocks.push_back(std::move(blk));
    }
    spec.functions.push_back(std::move(f));
  }
  // Give every function a caller so most of the program is reachable.
  for (int i = 1; i < n; ++i) {
    auto& caller = spec.functions[static_cast<std::size_t>(pick(0, i - 1))];
    auto& blk = caller.blocks[uniform_index(rng, caller.blocks.size())];
    blk.calls.insert(blk.calls.begin() +
                         static_cast<std::ptrdiff_t>(
                             uniform_index(rng, blk.calls.size() + 1)),
                     "f" + std::to_string(i));
  }
  WorkloadDef w;
  w.id = "default";
  w.rate = 1.0 + static_cast<double>(pick(0, 9));
  for (int r = 0; r < options.request_types; ++r) {
    w.mix.emplace_back("r" + std::to_string(r), 1.0 + uniform01(rng));
  }
  // Occasionally force a branch for one request type.
  for (auto& f : spec.functions) {
    for (auto& blk : f.blocks) {
      if (blk.successors.size() > 1 && uniform01(rng) < 0.2) {
        blk.by_request[w.mix[uniform_index(rng, w.mix.size())].first] =
            blk.successors[uniform_index(rng, blk.successors.size())];
      }
    }
  }
  spec.workloads.push_back(std::move(w));
  spec.entry = "f0";
  return ProgramModel(std::move(spec));
}

}  // namespace afetm
