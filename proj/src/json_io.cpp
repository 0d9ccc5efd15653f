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

#include "afetm/json_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace afetm {
namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

std::string field_path(std::string_view ctx, std::string_view key) {
  return std::string(ctx) + "." + std::string(key);
}

const Json& require(const Json& j, std::string_view key, std::string_view ctx) {
  if (!j.is_object()) {
    throw ParseError(std::string(ctx) + ": expected an object");
  }
  auto it = j.find(std::string(key));
  if (it == j.end()) {
    throw ParseError(field_path(ctx, key) + ": missing required field");
  }
  return *it;
}

template <class T>
T convert(const Json& v, std::string_view path) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ParseError(std::string(path) + ": expected a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) {
        throw ParseError(std::string(path) + ": expected an integer");
      }
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() &&
            v.get<std::int64_t>() < 0) {
          throw ParseError(std::string(path) + ": expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ParseError(std::string(path) + ": expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ParseError(std::string(path) + ": expected a string");
    }
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(path) + ": " + e.what());
  }
}

template <class T>
T get_req(const Json& j, std::string_view key, std::string_view ctx) {
  return convert<T>(require(j, key, ctx), field_path(ctx, key));
}

template <class T>
T get_opt(const Json& j, std::string_view key, T fallback,
          std::string_view ctx) {
  auto it = j.find(std::string(key));
  if (it == j.end() || it->is_null()) return fallback;
  return convert<T>(*it, field_path(ctx, key));
}

const Json& require_array(const Json& j, std::string_view key,
                          std::string_view ctx) {
  const Json& v = require(j, key, ctx);
  if (!v.is_array()) throw ParseError(field_path(ctx, key) + ": expected an array");
  return v;
}

std::vector<std::string> string_list(const Json& v, std::string_view path) {
  if (!v.is_array()) throw ParseError(std::string(path) + ": expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(convert<std::string>(v[i], std::string(path) + "[" +
                                                 std::to_string(i) + "]"));
  }
  return out;
}

Json node_to_json(const CallTreeNode& n) {
  Json children = Json::array();
  for (const auto& c : n.children) children.push_back(node_to_json(c));
  return Json{{"fn", n.function},
              {"color", std::string(to_string(n.color))},
              {"placeholder", n.placeholder},
              {"children", std::move(children)}};
}

CallTreeNode node_from_json(const Json& j, const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx + ": expected a tree node object");
  check_keys(j, {"fn", "color", "placeholder", "children"}, ctx);
  CallTreeNode n(get_req<std::string>(j, "fn", ctx));
  n.color = color_from_string(get_opt<std::string>(j, "color", "none", ctx));
  n.placeholder = get_opt<bool>(j, "placeholder", false, ctx);
  if (auto it = j.find("children"); it != j.end()) {
    if (!it->is_array()) throw ParseError(ctx + ".children: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      n.children.push_back(node_from_json(
          (*it)[i], ctx + ".children[" + std::to_string(i) + "]"));
    }
  }
  return n;
}

}  // namespace

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(source) + ":" + line_col(text, e.byte == 0 ? 0 : e.byte - 1) +
                     ": " + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path.string());
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, dump_json(j));
}

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                std::string_view context) {
  if (!obj.is_object()) {
    throw ParseError(std::string(context) + ": expected an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError(std::string(context) + ": unknown key '" + key + "'");
    }
  }
}

// --- CallTree -----------------------------------------------------------------

Json to_json(const CallTree& tree) {
  if (tree.roots.size() == 1) return node_to_json(tree.roots.front());
  Json arr = Json::array();
  for (const auto& r : tree.roots) arr.push_back(node_to_json(r));
  return arr;
}

CallTree call_tree_from_json(const Json& j) {
  CallTree t;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      t.roots.push_back(node_from_json(j[i], "tree[" + std::to_string(i) + "]"));
    }
  } else {
    t.roots.push_back(node_from_json(j, "tree"));
  }
  return t;
}

Json to_json(std::span<const CallTree> trees) {
  Json arr = Json::array();
  for (const auto& t : trees) arr.push_back(to_json(t));
  return arr;
}

std::vector<CallTree> call_trees_from_json(const Json& j) {
  // A single object is one tree; an array holds one entry per tree.
  if (j.is_object()) return {call_tree_from_json(j)};
  if (!j.is_array()) throw ParseError("trees: expected an array");
  std::vector<CallTree> out;
  for (const auto& t : j) out.push_back(call_tree_from_json(t));
  return out;
}

// --- Trace events -------------------------------------------------------------

Json to_json(const TraceEvent& e) {
  Json j{{"seq", e.seq}, {"fn", e.function}};
  j["caller"] = e.caller ? Json(*e.caller) : Json(nullptr);
  j["stack"] = e.callstack ? Json(*e.callstack) : Json(nullptr);
  return j;
}

TraceEvent trace_event_from_json(const Json& j) {
  constexpr std::string_view ctx = "event";
  check_keys(j, {"seq", "fn", "caller", "stack"}, ctx);
  TraceEvent e;
  e.seq = get_req<std::uint64_t>(j, "seq", ctx);
  e.function = get_req<std::string>(j, "fn", ctx);
  if (auto it = j.find("caller"); it != j.end() && !it->is_null()) {
    e.caller = convert<std::string>(*it, "event.caller");
  }
  if (auto it = j.find("stack"); it != j.end() && !it->is_null()) {
    e.callstack = string_list(*it, "event.stack");
  }
  return e;
}

std::vector<TraceEvent> read_events_ndjson(std::istream& in) {
  std::vector<TraceEvent> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(),
                    [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    const std::string where = "line " + std::to_string(lineno);
    try {
      out.push_back(trace_event_from_json(parse_json(line, where)));
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      if (msg.rfind(where, 0) == 0) throw;
      throw ParseError(where + ": " + msg);
    }
  }
  return out;
}

void write_events_ndjson(std::ostream& out, std::span<const TraceEvent> events) {
  for (const auto& e : events) out << to_json(e).dump() << '\n';
}

// --- Trace plan ---------------------------------------------------------------

Json to_json(const TracePlan& plan) {
  return Json{{"traced", plan.traced}, {"callstack", plan.callstack}};
}

TracePlan trace_plan_from_json(const Json& j) {
  TracePlan plan;
  if (j.is_array()) {
    for (auto& f : string_list(j, "plan")) plan.traced.insert(f);
    return plan;
  }
  check_keys(j, {"traced", "callstack"}, "plan");
  for (auto& f : string_list(require(j, "traced", "plan"), "plan.traced")) {
    plan.traced.insert(f);
  }
  if (auto it = j.find("callstack"); it != j.end()) {
    for (auto& f : string_list(*it, "plan.callstack")) plan.callstack.insert(f);
  }
  plan.validate();
  return plan;
}

// --- Program spec ---------------------------------------------------------------

Json to_json(const ProgramSpec& spec) {
  Json functions = Json::array();
  for (const auto& f : spec.functions) {
    Json blocks = Json::array();
    for (const auto& b : f.blocks) {
      Json jb{{"label", b.label}, {"succ", b.successors}, {"calls", b.calls}};
      if (b.on_error) jb["on_error"] = *b.on_error;
      if (b.on_failure) jb["on_failure"] = *b.on_failure;
      if (!b.by_request.empty()) jb["by_request"] = b.by_request;
      blocks.push_back(std::move(jb));
    }
    Json jf{{"id", f.id},
            {"params", f.params},
            {"cost", f.cost_per_call},
            {"blocks", std::move(blocks)}};
    if (f.returns == 0) {
      jf["returns"] = false;
    } else if (f.returns != 1) {
      jf["returns"] = f.returns;
    }
    functions.push_back(std::move(jf));
  }
  Json workloads = Json::array();
  for (const auto& w : spec.workloads) {
    Json mix = Json::object();
    for (const auto& [req, weight] : w.mix) mix[req] = weight;
    workloads.push_back(Json{{"id", w.id}, {"mix", std::move(mix)}, {"rate", w.rate}});
  }
  Json j{{"entry", spec.entry},
         {"functions", std::move(functions)},
         {"workloads", std::move(workloads)},
         {"seed", spec.rng_seed},
         {"max_depth", spec.max_depth},
         {"variants", spec.variants},
         {"max_block_steps", spec.max_block_steps}};
  if (!spec.loggers.empty()) j["loggers"] = spec.loggers;
  return j;
}

ProgramSpec program_spec_from_json(const Json& j) {
  constexpr std::string_view ctx = "program";
  check_keys(j, {"entry", "functions", "workloads", "seed", "max_depth",
                 "variants", "max_block_steps", "loggers"},
             ctx);
  ProgramSpec spec;
  spec.entry = get_req<std::string>(j, "entry", ctx);
  spec.rng_seed = get_opt<std::uint64_t>(j, "seed", 0, ctx);
  spec.max_depth = get_opt<int>(j, "max_depth", spec.max_depth, ctx);
  spec.variants = get_opt<int>(j, "variants", spec.variants, ctx);
  spec.max_block_steps =
      get_opt<int>(j, "max_block_steps", spec.max_block_steps, ctx);
  if (auto it = j.find("loggers"); it != j.end()) {
    spec.loggers = string_list(*it, "program.loggers");
  }
  const Json& functions = require_array(j, "functions", ctx);
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const Json& jf = functions[i];
    const std::string fctx = "functions[" + std::to_string(i) + "]";
    check_keys(jf, {"id", "params", "cost", "returns", "blocks"}, fctx);
    FunctionDef f;
    f.id = get_req<std::string>(jf, "id", fctx);
    f.params = get_opt<int>(jf, "params", 0, fctx);
    f.cost_per_call = get_opt<double>(jf, "cost", 1.0, fctx);
    // `returns` is a count of returned values; booleans mean 0 or 1.
    if (auto it = jf.find("returns"); it != jf.end() && it->is_boolean()) {
      f.returns = it->get<bool>() ? 1 : 0;
    } else {
      f.returns = get_opt<int>(jf, "returns", 1, fctx);
    }
    const Json& blocks = require_array(jf, "blocks", fctx);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const Json& jb = blocks[b];
      const std::string bctx = fctx + ".blocks[" + std::to_string(b) + "]";
      check_keys(jb, {"label", "succ", "calls", "on_error", "on_failure",
                      "by_request"}, bctx);
      BasicBlock blk;
      blk.label = get_req<int>(jb, "label", bctx);
      if (auto it = jb.find("succ"); it != jb.end()) {
        if (!it->is_array()) throw ParseError(bctx + ".succ: expected an array");
        for (std::size_t s = 0; s < it->size(); ++s) {
          blk.successors.push_back(convert<int>(
              (*it)[s], bctx + ".succ[" + std::to_string(s) + "]"));
        }
      }
      if (auto it = jb.find("calls"); it != jb.end()) {
        blk.calls = string_list(*it, bctx + ".calls");
      }
      if (auto it = jb.find("on_error"); it != jb.end() && !it->is_null()) {
        blk.on_error = convert<int>(*it, bctx + ".on_error");
      }
      if (auto it = jb.find("on_failure"); it != jb.end() && !it->is_null()) {
        blk.on_failure = convert<int>(*it, bctx + ".on_failure");
      }
      if (auto it = jb.find("by_request"); it != jb.end()) {
        if (!it->is_object()) {
          throw ParseError(bctx + ".by_request: expected an object");
        }
        for (const auto& [req, label] : it->items()) {
          blk.by_request[req] = convert<int>(label, bctx + ".by_request." + req);
        }
      }
      f.blocks.push_back(std::move(blk));
    }
    spec.functions.push_back(std::move(f));
  }
  if (auto it = j.find("workloads"); it != j.end()) {
    if (!it->is_array()) throw ParseError("program.workloads: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const Json& jw = (*it)[i];
      const std::string wctx = "workloads[" + std::to_string(i) + "]";
      check_keys(jw, {"id", "mix", "rate"}, wctx);
      WorkloadDef w;
      w.id = get_req<std::string>(jw, "id", wctx);
      w.rate = get_opt<double>(jw, "rate", 1.0, wctx);
      const Json& mix = require(jw, "mix", wctx);
      if (!mix.is_object()) throw ParseError(wctx + ".mix: expected an object");
      for (const auto& [req, weight] : mix.items()) {
        w.mix.emplace_back(req, convert<double>(weight, wctx + ".mix." + req));
      }
      spec.workloads.push_back(std::move(w));
    }
  }
  return spec;
}

// --- Coverage instances -----------------------------------------------------------

Json to_json(const CoverageInstance& instance) {
  Json functions = Json::array();
  for (std::size_t j = 0; j < instance.m(); ++j) {
    functions.push_back(Json{{"id", instance.ids[j]},
                             {"covers", instance.covers[j]},
                             {"weight", instance.w[j]}});
  }
  return Json{{"blocks", instance.n},
              {"functions", std::move(functions)},
              {"w_ub", instance.w_ub}};
}

CoverageInstance coverage_instance_from_json(const Json& j) {
  constexpr std::string_view ctx = "instance";
  check_keys(j, {"blocks", "functions", "w_ub"}, ctx);
  CoverageInstance inst;
  inst.n = get_req<std::size_t>(j, "blocks", ctx);
  inst.w_ub = get_opt<double>(j, "w_ub", 0.0, ctx);
  const Json& functions = require_array(j, "functions", ctx);
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const Json& jf = functions[i];
    const std::string fctx = "instance.functions[" + std::to_string(i) + "]";
    check_keys(jf, {"id", "covers", "weight"}, fctx);
    inst.ids.push_back(get_opt<std::string>(jf, "id", "f" + std::to_string(i + 1), fctx));
    std::vector<std::size_t> covers;
    const Json& jc = require_array(jf, "covers", fctx);
    for (std::size_t k = 0; k < jc.size(); ++k) {
      covers.push_back(
          convert<std::size_t>(jc[k], fctx + ".covers[" + std::to_string(k) + "]"));
    }
    std::sort(covers.begin(), covers.end());
    covers.erase(std::unique(covers.begin(), covers.end()), covers.end());
    inst.covers.push_back(std::move(covers));
    inst.w.push_back(get_req<double>(jf, "weight", fctx));
  }
  inst.validate();
  return inst;
}

Json to_json(const SelectionSolution& s, const CoverageInstance& instance) {
  Json selected = Json::array();
  for (std::size_t j = 0; j < s.x.size(); ++j) {
    if (s.x[j]) selected.push_back(instance.ids[j]);
  }
  return Json{{"selected", std::move(selected)},
              {"x", s.x},
              {"fitness", s.fitness},
              {"coverage", s.coverage_fraction},
              {"weight", s.total_weight},
              {"w_ub", instance.w_ub}};
}

Json to_json(const MmasParams& p) {
  return Json{{"n_ant", p.n_ant},     {"n_run", p.n_run},
              {"alpha", p.alpha},     {"beta", p.beta},
              {"rho", p.rho},         {"tau_ini", p.tau_ini},
              {"l", p.l},             {"q", p.q},
              {"eta_max", p.eta_max}, {"prune_redundant", p.prune_redundant}};
}

void update_from_json(MmasParams& p, const Json& j) {
  constexpr std::string_view ctx = "mmas";
  check_keys(j, {"n_ant", "n_run", "alpha", "beta", "rho", "tau_ini", "l", "q",
                 "eta_max", "seed", "prune_redundant"},
             ctx);
  p.n_ant = get_opt<int>(j, "n_ant", p.n_ant, ctx);
  p.n_run = get_opt<int>(j, "n_run", p.n_run, ctx);
  p.alpha = get_opt<double>(j, "alpha", p.alpha, ctx);
  p.beta = get_opt<double>(j, "beta", p.beta, ctx);
  p.rho = get_opt<double>(j, "rho", p.rho, ctx);
  p.tau_ini = get_opt<double>(j, "tau_ini", p.tau_ini, ctx);
  p.l = get_opt<double>(j, "l", p.l, ctx);
  p.q = get_opt<double>(j, "q", p.q, ctx);
  p.eta_max = get_opt<double>(j, "eta_max", p.eta_max, ctx);
  p.seed = get_opt<std::uint64_t>(j, "seed", p.seed, ctx);
  p.prune_redundant = get_opt<bool>(j, "prune_redundant", p.prune_redundant, ctx);
}

// --- Faults and FDDB ----------------------------------------------------------------

Json to_json(const FaultSpec& f) {
  Json j{{"kind", std::string(to_string(f.kind))},
         {"target", f.target},
         {"site", std::string(to_string(f.site))}};
  if (f.param_index) j["param_index"] = *f.param_index;
  if (f.return_index) j["return_index"] = *f.return_index;
  if (f.bit_index) j["bit_index"] = *f.bit_index;
  if (f.kind == FaultKind::kIpPlusN) j["n"] = f.skip;
  return j;
}

FaultSpec fault_spec_from_json(const Json& j) {
  constexpr std::string_view ctx = "fault";
  check_keys(j, {"kind", "target", "site", "param_index", "return_index", "bit_index", "n"}, ctx);
  FaultSpec f;
  f.kind = fault_kind_from_string(get_req<std::string>(j, "kind", ctx));
  f.target = get_req<std::string>(j, "target", ctx);
  const std::string default_site =
      f.kind == FaultKind::kOutputCorruption ? "return" : "entry";
  f.site = fault_site_from_string(get_opt<std::string>(j, "site", default_site, ctx));
  if (auto it = j.find("param_index"); it != j.end() && !it->is_null()) {
    f.param_index = convert<int>(*it, "fault.param_index");
  }
  if (auto it = j.find("return_index"); it != j.end() && !it->is_null()) {
    f.return_index = convert<int>(*it, "fault.return_index");
  }
  if (auto it = j.find("bit_index"); it != j.end() && !it->is_null()) {
    f.bit_index = convert<int>(*it, "fault.bit_index");
  }
  f.skip = get_opt<int>(j, "n", 1, ctx);
  return f;
}

Json to_json(const ScheduledRequest& r) {
  return Json{{"request", r.request_type}, {"seed", r.seed}};
}

ScheduledRequest scheduled_request_from_json(const Json& j) {
  constexpr std::string_view ctx = "witness";
  check_keys(j, {"request", "seed"}, ctx);
  return ScheduledRequest{get_req<std::string>(j, "request", ctx),
                          get_req<std::uint64_t>(j, "seed", ctx)};
}

namespace {

Json witnesses_to_json(const std::vector<ScheduledRequest>& ws) {
  Json arr = Json::array();
  for (const auto& w : ws) arr.push_back(to_json(w));
  return arr;
}

std::vector<ScheduledRequest> witnesses_from_json(const Json& j,
                                                  std::string_view ctx) {
  if (!j.is_array()) throw ParseError(std::string(ctx) + ": expected an array");
  std::vector<ScheduledRequest> out;
  for (const auto& w : j) out.push_back(scheduled_request_from_json(w));
  return out;
}

}  // namespace

Json to_json(const Fddb& fddb) {
  Json records = Json::array();
  for (const auto& r : fddb.records) {
    records.push_back(Json{{"fault", to_json(r.fault)},
                           {"label", r.label},
                           {"fcts", to_json(std::span<const CallTree>(r.fcts))},
                           {"witnesses", witnesses_to_json(r.witnesses)},
                           {"unactivated", r.unactivated},
                           {"executions", r.executions}});
  }
  return Json{{"format", "afetm-fddb"},
              {"version", 1},
              {"fingerprint", fddb.fingerprint},
              {"workload", fddb.workload},
              {"records", std::move(records)},
              {"normal", to_json(std::span<const CallTree>(fddb.normal))},
              {"normal_witnesses", witnesses_to_json(fddb.normal_witnesses)}};
}

Fddb fddb_from_json(const Json& j) {
  constexpr std::string_view ctx = "fddb";
  check_keys(j, {"format", "version", "fingerprint", "workload", "records",
                 "normal", "normal_witnesses"},
             ctx);
  if (get_opt<std::string>(j, "format", "afetm-fddb", ctx) != "afetm-fddb") {
    throw ParseError("fddb.format: not an FDDB file");
  }
  if (get_opt<int>(j, "version", 1, ctx) != 1) {
    throw ParseError("fddb.version: unsupported version");
  }
  Fddb db;
  db.fingerprint = get_opt<std::string>(j, "fingerprint", "", ctx);
  db.workload = get_opt<std::string>(j, "workload", "", ctx);
  const Json& records = require_array(j, "records", ctx);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Json& jr = records[i];
    const std::string rctx = "fddb.records[" + std::to_string(i) + "]";
    check_keys(jr, {"fault", "label", "fcts", "witnesses", "unactivated",
                    "executions"},
               rctx);
    FddbRecord r;
    r.fault = fault_spec_from_json(require(jr, "fault", rctx));
    r.label = get_opt<std::string>(jr, "label", r.fault.label(), rctx);
    r.fcts = call_trees_from_json(require(jr, "fcts", rctx));
    if (auto it = jr.find("witnesses"); it != jr.end()) {
      r.witnesses = witnesses_from_json(*it, rctx + ".witnesses");
    }
    r.unactivated = get_opt<bool>(jr, "unactivated", false, rctx);
    r.executions = get_opt<std::size_t>(jr, "executions", 0, rctx);
    db.records.push_back(std::move(r));
  }
  db.normal = call_trees_from_json(require(j, "normal", ctx));
  if (auto it = j.find("normal_witnesses"); it != j.end()) {
    db.normal_witnesses = witnesses_from_json(*it, "fddb.normal_witnesses");
  }
  db.validate();
  return db;
}

// --- Configurations ------------------------------------------------------------

Json to_json(const TrainingConfig& c) {
  return Json{{"layers", c.layers},
              {"hidden", c.hidden},
              {"learning_rate", c.learning_rate},
              {"epochs", c.epochs},
              {"early_stop_loss", c.early_stop_loss},
              {"optimizer", c.optimizer}};
}

void update_from_json(TrainingConfig& c, const Json& j) {
  constexpr std::string_view ctx = "gcn";
  check_keys(j, {"layers", "hidden", "learning_rate", "epochs", "early_stop_loss",
                 "optimizer", "seed"},
             ctx);
  c.layers = get_opt<int>(j, "layers", c.layers, ctx);
  c.hidden = get_opt<int>(j, "hidden", c.hidden, ctx);
  c.learning_rate = get_opt<double>(j, "learning_rate", c.learning_rate, ctx);
  c.epochs = get_opt<int>(j, "epochs", c.epochs, ctx);
  c.early_stop_loss = get_opt<double>(j, "early_stop_loss", c.early_stop_loss, ctx);
  c.optimizer = get_opt<std::string>(j, "optimizer", c.optimizer, ctx);
  c.seed = get_opt<std::uint64_t>(j, "seed", c.seed, ctx);
}

Json to_json(const ExperimentConfig& c) {
  return Json{{"model", c.model.generic_string()},
              {"workload", c.workload},
              {"p", c.budget_fraction},
              {"sampling_seconds", c.sampling_seconds},
              {"mmas", to_json(c.mmas)},
              {"gcn", to_json(c.gcn)},
              {"methods", c.methods},
              {"seed", c.seed},
              {"saturation_k", c.saturation_k},
              {"max_runs", c.max_runs},
              {"holdout_fraction", c.holdout_fraction},
              {"timeout_seconds", c.timeout_seconds},
              {"event_cost", c.event_cost},
              {"edc_threshold", c.edc_threshold},
              {"gdc_max_pairs", c.gdc_max_pairs},
              {"rtgr_budgets", c.rtgr_budgets},
              {"rtgr_seeds", c.rtgr_seeds}};
}

ExperimentConfig experiment_config_from_json(const Json& j,
                                             const std::filesystem::path& base_dir) {
  constexpr std::string_view ctx = "config";
  check_keys(j, {"model", "workload", "p", "sampling_seconds", "mmas", "gcn",
                 "methods", "seed", "saturation_k", "max_runs", "holdout_fraction",
                 "timeout_seconds", "event_cost", "edc_threshold", "gdc_max_pairs",
                 "rtgr_budgets", "rtgr_seeds", "jobs"},
             ctx);
  ExperimentConfig c;
  c.model = get_req<std::string>(j, "model", ctx);
  if (c.model.is_relative()) c.model = base_dir / c.model;
  c.workload = get_req<std::string>(j, "workload", ctx);
  c.budget_fraction = get_opt<double>(j, "p", c.budget_fraction, ctx);
  c.sampling_seconds = get_opt<double>(j, "sampling_seconds", c.sampling_seconds, ctx);
  if (auto it = j.find("mmas"); it != j.end()) update_from_json(c.mmas, *it);
  if (auto it = j.find("gcn"); it != j.end()) update_from_json(c.gcn, *it);
  if (auto it = j.find("methods"); it != j.end()) {
    c.methods = string_list(*it, "config.methods");
  }
  c.seed = get_opt<std::uint64_t>(j, "seed", c.seed, ctx);
  c.saturation_k = get_opt<int>(j, "saturation_k", c.saturation_k, ctx);
  c.max_runs = get_opt<std::size_t>(j, "max_runs", c.max_runs, ctx);
  c.holdout_fraction = get_opt<double>(j, "holdout_fraction", c.holdout_fraction, ctx);
  c.timeout_seconds = get_opt<double>(j, "timeout_seconds", c.timeout_seconds, ctx);
  c.event_cost = get_opt<double>(j, "event_cost", c.event_cost, ctx);
  c.edc_threshold = get_opt<double>(j, "edc_threshold", c.edc_threshold, ctx);
  c.gdc_max_pairs = get_opt<std::size_t>(j, "gdc_max_pairs", c.gdc_max_pairs, ctx);
  if (auto it = j.find("rtgr_budgets"); it != j.end()) {
    if (!it->is_array()) throw ParseError("config.rtgr_budgets: expected an array");
    c.rtgr_budgets.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      c.rtgr_budgets.push_back(
          convert<double>((*it)[i], "config.rtgr_budgets[" + std::to_string(i) + "]"));
    }
  }
  c.rtgr_seeds = get_opt<int>(j, "rtgr_seeds", c.rtgr_seeds, ctx);
  c.jobs = get_opt<unsigned>(j, "jobs", c.jobs, ctx);
  return c;
}

}  // namespace afetm
