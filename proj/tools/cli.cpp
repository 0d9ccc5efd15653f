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

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "afetm/baselines.hpp"
#include "afetm/calltree.hpp"
#include "afetm/diagnoser.hpp"
#include "afetm/harness.hpp"
#include "afetm/injector.hpp"
#include "afetm/json_io.hpp"
#include "afetm/progmodel.hpp"
#include "afetm/selector.hpp"

namespace afetm::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kTagCliSampling = 0x636c692d73616d70ULL;

// Bad invocation: reported with exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  bool json = false;
  unsigned jobs = 0;
  std::string out;

  std::uint64_t resolved_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("AFETM_SEED"); env != nullptr && *env != '\0') {
      try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(env, &pos);
        if (pos == std::string_view(env).size()) return v;
      } catch (const std::exception&) {
      }
      throw UsageError(std::string("AFETM_SEED is not an unsigned integer: ") + env);
    }
    return 0;
  }
  bool seed_given() const {
    const char* env = std::getenv("AFETM_SEED");
    return seed.has_value() || (env != nullptr && *env != '\0');
  }
  unsigned resolved_jobs() const { return jobs == 0 ? default_jobs() : jobs; }
};

void require_file(const std::string& path, std::string_view what) {
  if (path.empty()) throw UsageError(std::string(what) + " path is required");
  if (!fs::is_regular_file(path)) {
    throw UsageError(std::string(what) + " not found: " + path);
  }
}

Json read_input(const std::string& path, std::string_view what) {
  require_file(path, what);
  return read_json_file(path);
}

// Artifact to --out (with a one-line note on stdout) or to stdout.
void emit(const Globals& g, const Json& artifact, const Json& summary, std::ostream& out) {
  if (g.out.empty()) {
    out << dump_json(artifact);
    return;
  }
  write_json_file(g.out, artifact);
  if (g.json) {
    out << dump_json(summary);
  } else {
    out << "wrote " << g.out << "\n";
  }
}

FunctionSet read_traced(const std::string& path) {
  const Json j = read_input(path, "traced set");
  return trace_plan_from_json(j).traced;
}

TracePlan plan_or_all(const std::string& plan_path, const Fddb& fddb) {
  if (!plan_path.empty()) return trace_plan_from_json(read_input(plan_path, "plan"));
  TracePlan plan;
  auto add = [&](const CallTree& t) {
    for (const auto& f : preorder(t)) plan.traced.insert(f);
  };
  for (const auto& t : fddb.normal) add(t);
  for (const auto& r : fddb.records) {
    for (const auto& t : r.fcts) add(t);
  }
  return plan;
}

Json diagnosis_json(const Diagnosis& d, std::size_t topk) {
  Json top = Json::array();
  for (const auto& [label, p] : d.top(topk)) top.push_back(Json{{"label", label}, {"score", p}});
  return Json{{"error_detected", d.error_detected},
              {"located", d.located ? Json(*d.located) : Json(nullptr)},
              {"candidates", d.candidate_functions(topk)},
              {"top", std::move(top)}};
}

struct MmasFlags {
  std::optional<int> n_ant, n_run;
  std::optional<double> alpha, beta, rho, tau_ini, l, q, eta_max;
  bool no_prune = false;

  void attach(CLI::App* app) {
    app->add_option("--n-ant", n_ant, "Ants per iteration (default 20)");
    app->add_option("--n-run", n_run, "Iterations (default 200)");
    app->add_option("--alpha", alpha, "Pheromone exponent (default 1)");
    app->add_option("--beta", beta, "Heuristic exponent (default 2)");
    app->add_option("--rho", rho, "Evaporation rate (default 0.1)");
    app->add_option("--tau-ini", tau_ini, "Initial and maximum pheromone (default 1)");
    app->add_option("--l", l, "tau_max / tau_min ratio (default 50)");
    app->add_option("--q", q, "Deposit constant (default 1)");
    app->add_option("--eta-max", eta_max, "Heuristic cap (default 10)");
    app->add_flag("--no-prune", no_prune, "Keep redundant functions in ant solutions");
  }
  MmasParams apply(MmasParams p) const {
    if (n_ant) p.n_ant = *n_ant;
    if (n_run) p.n_run = *n_run;
    if (alpha) p.alpha = *alpha;
    if (beta) p.beta = *beta;
    if (rho) p.rho = *rho;
    if (tau_ini) p.tau_ini = *tau_ini;
    if (l) p.l = *l;
    if (q) p.q = *q;
    if (eta_max) p.eta_max = *eta_max;
    if (no_prune) p.prune_redundant = false;
    return p;
  }
};

struct GcnFlags {
  std::optional<int> layers, hidden, epochs;
  std::optional<double> learning_rate, early_stop;
  std::optional<std::string> optimizer;

  void attach(CLI::App* app) {
    app->add_option("--layers", layers, "GCN layers (default 3)");
    app->add_option("--hidden", hidden, "Hidden width (default 64)");
    app->add_option("--epochs", epochs, "Maximum epochs (default 500)");
    app->add_option("--lr", learning_rate, "Learning rate (default 0.05)");
    app->add_option("--early-stop", early_stop, "Stop below this loss (default 1e-3)");
    app->add_option("--optimizer", optimizer, "gd or adam (default gd)");
  }
  TrainingConfig apply(TrainingConfig c) const {
    if (layers) c.layers = *layers;
    if (hidden) c.hidden = *hidden;
    if (epochs) c.epochs = *epochs;
    if (learning_rate) c.learning_rate = *learning_rate;
    if (early_stop) c.early_stop_loss = *early_stop;
    if (optimizer) c.optimizer = *optimizer;
    return c;
  }
};

// --- Subcommands ----------------------------------------------------------------

struct SelectArgs {
  std::string instance, model, workload;
  std::optional<double> p;
  double sampling_seconds = kDefaultSamplingSeconds;
  bool oracle = false;
  MmasFlags mmas;
};

int cmd_select(const SelectArgs& a, const Globals& g, std::ostream& out) {
  if (a.instance.empty() == a.model.empty()) {
    throw UsageError("select: give exactly one of --instance or --model");
  }
  if (a.p && !(*a.p > 0.0 && *a.p <= 1.0)) {
    throw UsageError("select: --p must be in (0, 1] (w_ub must be > 0)");
  }
  const std::uint64_t seed = g.resolved_seed();
  CoverageInstance inst;
  if (!a.instance.empty()) {
    inst = coverage_instance_from_json(read_input(a.instance, "instance"));
    if (a.p) {
      double total = 0.0;
      for (double w : inst.w) total += w;
      inst.w_ub = *a.p * total;
    }
    if (!(inst.w_ub > 0.0)) throw UsageError("select: w_ub must be > 0 (pass --p)");
    inst.validate();
  } else {
    require_file(a.model, "model");
    if (!a.p) throw UsageError("select: --p is required with --model");
    const ProgramModel model = load_program_spec(a.model);
    const WeightVector w = sample_frequencies(model, a.workload, a.sampling_seconds,
                                              substream(seed, {kTagCliSampling}));
    inst = build_coverage_instance(model, w, *a.p);
  }
  MmasParams params = a.mmas.apply(MmasParams{});
  params.seed = seed;
  params.jobs = g.resolved_jobs();
  params.validate();
  SelectionSolution sol = a.oracle ? brute_force_select(inst) : mmas_select(inst, params);
  Json j = to_json(sol, inst);
  j["method"] = a.oracle ? "brute_force" : "mmas";
  emit(g, j, Json{{"fitness", sol.fitness}, {"coverage", sol.coverage_fraction}}, out);
  return kExitOk;
}

struct InjectArgs {
  std::string model, workload, faults;
  int saturation = 3;
  std::size_t max_runs = 200;
  double sampling_seconds = kDefaultSamplingSeconds;
};

int cmd_inject(const InjectArgs& a, const Globals& g, std::ostream& out) {
  require_file(a.model, "model");
  const ProgramModel model = load_program_spec(a.model);
  const std::uint64_t seed = g.resolved_seed();
  std::vector<FaultSpec> faults;
  if (!a.faults.empty()) {
    const Json j = read_input(a.faults, "fault list");
    if (!j.is_array()) throw ParseError(a.faults + ": expected an array of faults");
    for (const auto& f : j) faults.push_back(fault_spec_from_json(f));
  } else {
    const WeightVector w = sample_frequencies(model, a.workload, a.sampling_seconds,
                                              substream(seed, {kTagCliSampling}));
    faults = enumerate_fault_points(model, w);
  }
  CampaignOptions opts;
  opts.saturation_k = a.saturation;
  opts.max_runs = a.max_runs;
  opts.seed = seed;
  opts.jobs = g.resolved_jobs();
  const Fddb db = run_campaign(model, a.workload, faults, opts);
  std::size_t trees = db.normal.size();
  for (const auto& r : db.records) trees += r.fcts.size();
  emit(g, to_json(db),
       Json{{"records", db.records.size()},
            {"activated", db.activated_count()},
            {"trees", trees}},
       out);
  return kExitOk;
}

struct TrainArgs {
  std::string fddb, plan;
  GcnFlags gcn;
};

int cmd_train(const TrainArgs& a, const Globals& g, std::ostream& out) {
  const Fddb db = fddb_from_json(read_input(a.fddb, "fddb"));
  const TracePlan plan = trace_plan_from_json(read_input(a.plan, "plan"));
  TrainingConfig config = a.gcn.apply(TrainingConfig{});
  config.seed = g.resolved_seed();
  config.jobs = g.resolved_jobs();
  config.validate();
  const GcnModel model = train(db, plan, config);
  const Json summary{{"labels", model.labels.size()},
                     {"catalog", model.catalog.size()},
                     {"final_loss", model.final_loss},
                     {"epochs", model.epochs_run}};
  if (g.out.empty()) throw UsageError("train: --out is required");
  save_model(model, g.out);
  if (g.json) {
    out << dump_json(summary);
  } else {
    out << "wrote " << g.out << " (" << model.labels.size() << " labels, loss "
        << model.final_loss << ")\n";
  }
  return kExitOk;
}

CallTree afct_from_inputs(const std::string& afct, const std::string& events) {
  if (afct.empty() == events.empty()) {
    throw UsageError("give exactly one of --afct or --events");
  }
  if (!afct.empty()) return call_tree_from_json(read_input(afct, "AFCT"));
  require_file(events, "events");
  std::ifstream in(events);
  const auto ev = read_events_ndjson(in);
  return build_afct(ev);
}

struct DiagnoseArgs {
  std::string model, afct, events;
  std::size_t topk = 3;
};

int cmd_diagnose(const DiagnoseArgs& a, const Globals& g, std::ostream& out) {
  require_file(a.model, "model");
  const GcnModel model = load_model(a.model);
  const CallTree tree = afct_from_inputs(a.afct, a.events);
  const Json j = diagnosis_json(diagnose(tree, model), a.topk);
  emit(g, j, j, out);
  return kExitOk;
}

struct GdcArgs {
  std::string fddb, plan, afct, events;
  std::size_t max_pairs = 20000;
  std::size_t topk = 3;
};

int cmd_gdc(const GdcArgs& a, const Globals& g, std::ostream& out) {
  const Fddb db = fddb_from_json(read_input(a.fddb, "fddb"));
  const CallTree tree = afct_from_inputs(a.afct, a.events);
  GaussianIndexOptions opts;
  opts.max_pairs = a.max_pairs;
  opts.seed = g.resolved_seed();
  opts.jobs = g.resolved_jobs();
  const GaussianIndex index = build_gaussian_index(db, plan_or_all(a.plan, db), opts);
  Json j = diagnosis_json(afct_gdc_diagnose(tree, index), a.topk);
  j["sigma"] = index.sigma;
  j["sigma_degenerate"] = index.sigma_degenerate;
  emit(g, j, j, out);
  return kExitOk;
}

struct EdcArgs {
  std::string normal, fct;
  double threshold = 0.0;
};

int cmd_edc(const EdcArgs& a, const Globals& g, std::ostream& out) {
  if (!(a.threshold >= 0.0)) throw UsageError("edc: --threshold must be >= 0");
  const auto normal = call_trees_from_json(read_input(a.normal, "normal trees"));
  const CallTree run = call_tree_from_json(read_input(a.fct, "FCT"));
  const EdcResult r = fct_edc_detect(run, normal, a.threshold);
  const Json j{{"error", r.error},
               {"located", r.located ? Json(*r.located) : Json(nullptr)},
               {"distance", r.distance}};
  emit(g, j, j, out);
  return kExitOk;
}

struct LogArgs {
  std::string model, fddb;
};

int cmd_log(const LogArgs& a, const Globals& g, std::ostream& out) {
  require_file(a.model, "model");
  const ProgramModel model = load_program_spec(a.model);
  const Fddb db = fddb_from_json(read_input(a.fddb, "fddb"));
  const LogModel logs = derive_log_model(model);
  Json rows = Json::array();
  std::size_t n = 0;
  std::size_t detected = 0;
  std::vector<std::size_t> distances;
  for (const auto& r : db.records) {
    if (r.unactivated) continue;
    for (const auto& t : r.fcts) {
      const LogResult lr = log_oracle_diagnose(t, r.fault.target, logs);
      ++n;
      detected += lr.detected ? 1 : 0;
      if (lr.fld) distances.push_back(*lr.fld);
      rows.push_back(Json{{"fault", r.fault.key()},
                          {"detected", lr.detected},
                          {"logger", lr.logger ? Json(*lr.logger) : Json(nullptr)},
                          {"fld", lr.fld ? Json(*lr.fld) : Json(nullptr)}});
    }
  }
  Json summary{{"experiments", n},
               {"detected", detected},
               {"edr", n > 0 ? edr(detected, n) : 0.0},
               {"fld", distances.empty() ? Json(nullptr) : Json(fld_summary(distances))}};
  Json j = summary;
  j["records"] = std::move(rows);
  emit(g, j, summary, out);
  return kExitOk;
}

struct EvaluateArgs {
  std::string config;
  std::string out_dir = "afetm-report";
};

int cmd_evaluate(const EvaluateArgs& a, const Globals& g, std::ostream& out) {
  require_file(a.config, "config");
  ExperimentConfig config = load_experiment_config(a.config);
  require_file(config.model.string(), "model");
  if (g.seed_given()) config.seed = g.resolved_seed();
  if (g.jobs != 0) config.jobs = g.jobs;
  const ProgramModel model = load_program_spec(config.model);
  const CampaignResult result = run_experiment(config, model);
  const fs::path dir = g.out.empty() ? fs::path(a.out_dir) : fs::path(g.out);
  write_reports(result, config, dir);
  Json rows = Json::array();
  for (const auto& s : result.summaries) {
    rows.push_back(Json{{"method", s.method},
                        {"split", s.split},
                        {"edr", s.edr},
                        {"flr", s.flr},
                        {"flr_top3", s.flr_top3},
                        {"fld", s.fld ? Json(*s.fld) : Json(nullptr)},
                        {"rtgr", s.rtgr}});
  }
  if (g.json) {
    out << dump_json(Json{{"out", dir.generic_string()}, {"summaries", std::move(rows)}});
  } else {
    out << "method      split    EDR%    FLR%   top3%     FLD   RTGR%\n";
    for (const auto& s : result.summaries) {
      char line[160];
      std::snprintf(line, sizeof line, "%-11s %-7s %6.1f  %6.1f  %6.1f  %6s  %6.1f\n",
                    s.method.c_str(), s.split.c_str(), s.edr, s.flr, s.flr_top3,
                    s.fld ? std::to_string(*s.fld).substr(0, 6).c_str() : "-", s.rtgr);
      out << line;
    }
    out << "reports in " << dir.generic_string() << "\n";
  }
  return kExitOk;
}

struct ColorArgs {
  std::string fcts, traced;
};

int cmd_color(const ColorArgs& a, const Globals& g, std::ostream& out) {
  const auto trees = call_trees_from_json(read_input(a.fcts, "FCT list"));
  const ColoringResult r = color_fcts(trees, read_traced(a.traced));
  const Json j{{"colored", to_json(std::span<const CallTree>(r.colored))},
               {"callstack", r.callstack}};
  emit(g, j, Json{{"trees", r.colored.size()}, {"callstack", r.callstack}}, out);
  return kExitOk;
}

struct BuildAfctArgs {
  std::string events, plan;
  bool by_name = false;
};

int cmd_build_afct(const BuildAfctArgs& a, const Globals& g, std::ostream& out) {
  require_file(a.events, "events");
  std::ifstream in(a.events);
  std::vector<TraceEvent> ev = read_events_ndjson(in);
  if (!a.plan.empty()) {
    ev = filter_events(ev, trace_plan_from_json(read_input(a.plan, "plan")));
  }
  const CallTree t = a.by_name ? build_afct_by_name(ev) : build_afct(ev);
  emit(g, to_json(t), Json{{"nodes", t.size()}}, out);
  return kExitOk;
}

struct TedArgs {
  std::string a, b;
};

int cmd_ted(const TedArgs& a, const Globals& g, std::ostream& out) {
  const CallTree x = call_tree_from_json(read_input(a.a, "tree"));
  const CallTree y = call_tree_from_json(read_input(a.b, "tree"));
  const Json j{{"distance", tree_edit_distance(x, y)}};
  emit(g, j, j, out);
  return kExitOk;
}

struct FldArgs {
  std::string tree, located, actual;
};

int cmd_fld(const FldArgs& a, const Globals& g, std::ostream& out) {
  const CallTree t = call_tree_from_json(read_input(a.tree, "tree"));
  const Json j{{"fld", preorder_distance(t, a.located, a.actual)}};
  emit(g, j, j, out);
  return kExitOk;
}

struct RunArgs {
  std::string model, request, fault, events_out;
  std::uint64_t request_seed = 0;
};

int cmd_run(const RunArgs& a, const Globals& g, std::ostream& out) {
  require_file(a.model, "model");
  const ProgramModel model = load_program_spec(a.model);
  std::optional<FaultSpec> fault;
  if (!a.fault.empty()) fault = fault_spec_from_json(read_input(a.fault, "fault"));
  const Execution e = fault ? apply_fault(model, *fault, a.request, a.request_seed)
                            : execute_request(model, a.request, a.request_seed);
  if (!a.events_out.empty()) {
    std::ostringstream os;
    write_events_ndjson(os, e.events);
    write_text_file(a.events_out, os.str());
  }
  const Json j{{"fct", to_json(e.fct)},
               {"outcome", std::string(to_string(e.outcome))},
               {"fault_activated", e.fault_activated},
               {"cost", e.cost}};
  emit(g, j, Json{{"outcome", std::string(to_string(e.outcome))}}, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive function-level tracing and call-tree fault diagnosis.", "afetm"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Global seed (falls back to $AFETM_SEED, then 0)");
  app.add_flag("--json", g.json, "Machine-readable JSON on stdout");
  app.add_option("--jobs", g.jobs, "Worker threads (default: logical CPUs)");
  app.add_option("--out", g.out, "Output file (directory for evaluate)");

  SelectArgs sel;
  auto* c_sel = app.add_subcommand("select", "Choose trace points under a weight budget");
  c_sel->add_option("--instance", sel.instance, "Coverage instance JSON");
  c_sel->add_option("--model", sel.model, "Program model JSON (builds the instance)");
  c_sel->add_option("--workload", sel.workload, "Workload id for --model");
  c_sel->add_option("--p", sel.p, "Budget fraction of the total weight, in (0, 1]");
  c_sel->add_option("--sampling-seconds", sel.sampling_seconds,
                    "Frequency sampling window (default 10)");
  c_sel->add_flag("--oracle", sel.oracle, "Exhaustive search (at most 24 functions)");
  sel.mmas.attach(c_sel);

  InjectArgs inj;
  auto* c_inj = app.add_subcommand("inject", "Run a fault campaign and write the FDDB");
  c_inj->add_option("--model", inj.model, "Program model JSON")->required();
  c_inj->add_option("--workload", inj.workload, "Workload id")->required();
  c_inj->add_option("--faults", inj.faults, "Fault list JSON (default: all fault points)");
  c_inj->add_option("--saturation", inj.saturation,
                    "Stop after this many runs without a new tree (default 3)");
  c_inj->add_option("--max-runs", inj.max_runs, "Run cap per fault (default 200)");
  c_inj->add_option("--sampling-seconds", inj.sampling_seconds,
                    "Frequency sampling window (default 10)");

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train the GCN diagnoser on an FDDB");
  c_tr->add_option("--fddb", tr.fddb, "FDDB JSON")->required();
  c_tr->add_option("--plan", tr.plan, "Trace plan JSON")->required();
  tr.gcn.attach(c_tr);

  DiagnoseArgs dg;
  auto* c_dg = app.add_subcommand("diagnose", "Classify an AFCT with a trained model");
  c_dg->add_option("--model", dg.model, "Trained model file")->required();
  c_dg->add_option("--afct", dg.afct, "AFCT JSON");
  c_dg->add_option("--events", dg.events, "Adaptive trace NDJSON (builds the AFCT)");
  c_dg->add_option("--topk", dg.topk, "Labels to report (default 3)");

  auto* c_base = app.add_subcommand("baseline", "Comparison methods");
  c_base->require_subcommand(1);
  GdcArgs gdc;
  auto* c_gdc = c_base->add_subcommand("gdc", "Gaussian influence against the FDDB");
  c_gdc->add_option("--fddb", gdc.fddb, "FDDB JSON")->required();
  c_gdc->add_option("--plan", gdc.plan, "Trace plan JSON (default: trace everything)");
  c_gdc->add_option("--afct", gdc.afct, "AFCT JSON");
  c_gdc->add_option("--events", gdc.events, "Adaptive trace NDJSON");
  c_gdc->add_option("--max-pairs", gdc.max_pairs, "Pairs sampled for sigma (default 20000)");
  c_gdc->add_option("--topk", gdc.topk, "Labels to report (default 3)");
  EdcArgs edc;
  auto* c_edc = c_base->add_subcommand("edc", "Edit distance to the normal trees");
  c_edc->add_option("--normal", edc.normal, "Normal FCT list JSON")->required();
  c_edc->add_option("--fct", edc.fct, "FCT JSON")->required();
  c_edc->add_option("--threshold", edc.threshold, "Distance threshold (default 0)");
  LogArgs lg;
  auto* c_log = c_base->add_subcommand("log", "Idealized error-log detector");
  c_log->add_option("--model", lg.model, "Program model JSON")->required();
  c_log->add_option("--fddb", lg.fddb, "FDDB JSON")->required();

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Run the full experiment from a config");
  c_ev->alias("pipeline");
  c_ev->add_option("--config", ev.config, "Experiment config JSON")->required();
  c_ev->add_option("--out-dir", ev.out_dir, "Report directory (default afetm-report)");

  auto* c_tools = app.add_subcommand("tools", "Individual building blocks");
  c_tools->require_subcommand(1);
  ColorArgs col;
  auto* c_col = c_tools->add_subcommand("color", "Color FCTs by a traced set");
  c_col->add_option("--fcts", col.fcts, "FCT list JSON")->required();
  c_col->add_option("--traced", col.traced, "Traced functions (array or plan)")->required();
  BuildAfctArgs ba;
  auto* c_ba = c_tools->add_subcommand("build-afct", "Rebuild an AFCT from trace events");
  c_ba->add_option("--events", ba.events, "Trace NDJSON")->required();
  c_ba->add_option("--plan", ba.plan, "Filter the events by this plan first");
  c_ba->add_flag("--by-name", ba.by_name, "Use the table-driven variant");
  TedArgs ted;
  auto* c_ted = c_tools->add_subcommand("ted", "Tree edit distance of two trees");
  c_ted->add_option("a", ted.a, "First tree JSON")->required();
  c_ted->add_option("b", ted.b, "Second tree JSON")->required();
  FldArgs fld;
  auto* c_fld = c_tools->add_subcommand("fld", "Preorder distance of two functions");
  c_fld->add_option("--tree", fld.tree, "Tree JSON")->required();
  c_fld->add_option("--located", fld.located, "Located function")->required();
  c_fld->add_option("--actual", fld.actual, "Actual faulty function")->required();
  RunArgs run;
  auto* c_run = c_tools->add_subcommand("run", "Execute one request in the simulator");
  c_run->add_option("--model", run.model, "Program model JSON")->required();
  c_run->add_option("--request", run.request, "Request type")->required();
  c_run->add_option("--request-seed", run.request_seed, "Request seed (default 0)");
  c_run->add_option("--fault", run.fault, "Fault JSON");
  c_run->add_option("--events-out", run.events_out, "Write the full trace as NDJSON");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("afetm");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (app.get_subcommands().empty()) err << app.help();
    return kExitUsage;
  }

  try {
    if (c_sel->parsed()) return cmd_select(sel, g, out);
    if (c_inj->parsed()) return cmd_inject(inj, g, out);
    if (c_tr->parsed()) return cmd_train(tr, g, out);
    if (c_dg->parsed()) return cmd_diagnose(dg, g, out);
    if (c_gdc->parsed()) return cmd_gdc(gdc, g, out);
    if (c_edc->parsed()) return cmd_edc(edc, g, out);
    if (c_log->parsed()) return cmd_log(lg, g, out);
    if (c_ev->parsed()) return cmd_evaluate(ev, g, out);
    if (c_col->parsed()) return cmd_color(col, g, out);
    if (c_ba->parsed()) return cmd_build_afct(ba, g, out);
    if (c_ted->parsed()) return cmd_ted(ted, g, out);
    if (c_fld->parsed()) return cmd_fld(fld, g, out);
    if (c_run->parsed()) return cmd_run(run, g, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  err << "error: no command\n";
  return kExitUsage;
}

}  // namespace afetm::cli
