/* Copyright 2026 The Meshsearch Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#include "meshsearch/cli.h"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "meshsearch/cost_model.h"
#include "meshsearch/json_io.h"
#include "meshsearch/meta_controller.h"
#include "meshsearch/model_zoo.h"
#include "meshsearch/oracle.h"
#include "meshsearch/partition.h"
#include "meshsearch/search.h"

namespace meshsearch {
namespace {

// A status tagged with the exit code it maps to.
struct Failure {
  int code;
  absl::Status status;
};

struct InputFlags {
  std::string graph_path;
  std::string model;
  std::string model_cfg;
  std::string mesh;
  std::string cost_cfg;
  std::string out;
};

struct Loaded {
  ModuleState start;
  CostModelConfig cost_cfg;
};

void AddInputFlags(CLI::App* cmd, InputFlags* f) {
  cmd->add_option("--graph", f->graph_path, "Graph JSON file");
  cmd->add_option("--model", f->model, "Zoo model: transformer, gns or unet");
  cmd->add_option("--model-cfg", f->model_cfg,
                  "Model config as a JSON file or inline JSON object");
  cmd->add_option("--mesh", f->mesh, "Mesh, e.g. batch=2,model=2");
  cmd->add_option("--cost-cfg", f->cost_cfg, "Cost model config JSON file");
  cmd->add_option("--out", f->out, "Output file (default stdout)");
}

absl::StatusOr<Json> JsonArgument(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      return absl::InvalidArgumentError("inline JSON does not parse");
    }
    return j;
  }
  return ReadJsonFile(text);
}

std::optional<Failure> Load(const InputFlags& f, Loaded* loaded) {
  auto config_error = [](absl::Status s) {
    return Failure{kExitConfig, std::move(s)};
  };
  if (f.graph_path.empty() == f.model.empty()) {
    return config_error(
        absl::InvalidArgumentError("exactly one of --graph or --model is required"));
  }
  std::optional<Mesh> mesh;
  if (!f.mesh.empty()) {
    absl::StatusOr<Mesh> parsed = Mesh::Parse(f.mesh);
    if (!parsed.ok()) return config_error(parsed.status());
    mesh = *std::move(parsed);
  }

  std::optional<Graph> graph;
  if (!f.graph_path.empty()) {
    absl::StatusOr<Json> j = ReadJsonFile(f.graph_path);
    if (!j.ok()) return config_error(j.status());
    absl::StatusOr<GraphFile> file = GraphFromJson(*j);
    if (!file.ok()) return Failure{kExitValidation, file.status()};
    if (!mesh.has_value()) mesh = file->mesh;
    graph = std::move(file->graph);
  }
  if (!mesh.has_value()) {
    return config_error(absl::InvalidArgumentError(
        "no mesh: pass --mesh or declare one in the graph file"));
  }
  if (!f.model.empty()) {
    Json cfg = Json::object();
    if (!f.model_cfg.empty()) {
      absl::StatusOr<Json> j = JsonArgument(f.model_cfg);
      if (!j.ok()) return config_error(j.status());
      cfg = *std::move(j);
    }
    absl::StatusOr<Graph> built = BuildModel(f.model, cfg, &*mesh);
    if (!built.ok()) {
      const bool divisibility =
          built.status().code() == absl::StatusCode::kFailedPrecondition;
      return Failure{divisibility ? kExitValidation : kExitConfig,
                     built.status()};
    }
    graph = *std::move(built);
  }

  auto problem = PartitionProblem::Create(*std::move(graph), *mesh);
  if (!problem.ok()) return Failure{kExitValidation, problem.status()};
  loaded->start = ModuleState::Initial(*std::move(problem));

  if (!f.cost_cfg.empty()) {
    absl::StatusOr<Json> j = ReadJsonFile(f.cost_cfg);
    if (!j.ok()) return config_error(j.status());
    absl::StatusOr<CostModelConfig> cfg = CostConfigFromJson(*j);
    if (!cfg.ok()) return config_error(cfg.status());
    loaded->cost_cfg = *std::move(cfg);
  }
  return std::nullopt;
}

absl::Status Emit(const std::string& path, const std::string& text,
                  std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return absl::OkStatus();
  }
  return WriteTextFile(path, text);
}

int Report(const Failure& failure, std::ostream& err) {
  err << "error: " << failure.status.message() << "\n";
  return failure.code;
}

std::string Num(double x) { return absl::StrFormat("%.17g", x); }

// search

struct SearchFlags {
  InputFlags input;
  std::string schedule = "RT1_RT2_MEM1";
  int64_t budget = 2000;
  uint64_t seed = 0;
  int seeds = 1;
  bool rollover = false;
  bool parallel = false;
  double uct_c = 1.0;
  int max_depth = 0;
  std::string trace;
};

Json GoalJson(const GoalOutcome& g, const Mesh& mesh) {
  Json j;
  j["goal"] = GoalToString(g.goal, mesh);
  j["budget"] = g.budget;
  j["trajectories_used"] = g.result.trajectories_used;
  j["trajectories_to_best"] = g.result.trajectories_to_best;
  j["distinct_states_visited"] = g.result.distinct_states_visited;
  j["tree_nodes"] = g.result.tree_nodes;
  j["exhausted"] = g.result.exhausted;
  j["committed"] = g.committed;
  j["metric_before"] = g.metric_before;
  j["metric_after"] = g.metric_after;
  return j;
}

int CmdSearch(const SearchFlags& f, std::ostream& out, std::ostream& err) {
  Loaded loaded;
  if (auto failure = Load(f.input, &loaded)) return Report(*failure, err);
  const Mesh& mesh = loaded.start.mesh();
  if (f.budget <= 0 || f.seeds <= 0) {
    return Report({kExitConfig, absl::InvalidArgumentError(
                                    "--budget and --seeds must be positive")},
                  err);
  }
  absl::StatusOr<Schedule> schedule = ParseSchedule(f.schedule, mesh, f.budget);
  if (!schedule.ok()) return Report({kExitConfig, schedule.status()}, err);

  ScheduleOptions options;
  options.seed = f.seed;
  options.rollover = f.rollover;
  options.uct_c = f.uct_c;
  options.max_depth = f.max_depth;
  options.parallel_expand = f.parallel && f.seeds == 1;
  options.record_trace = !f.trace.empty();
  auto runs = f.parallel ? RunSeedsParallel(loaded.start, *schedule,
                                            loaded.cost_cfg, options, f.seeds)
                         : RunSeedsSerial(loaded.start, *schedule,
                                          loaded.cost_cfg, options, f.seeds);
  std::vector<ScheduleOutcome> outcomes;
  for (auto& run : runs) {
    if (!run.ok()) return Report({kExitValidation, run.status()}, err);
    outcomes.push_back(*std::move(run));
  }
  const ScheduleOutcome& best = outcomes[BestOutcome(outcomes)];

  Json report;
  report["graph"] = loaded.start.graph().name();
  report["mesh"] = mesh.ToString();
  report["schedule"] = schedule->name;
  report["total_budget"] = f.budget;
  report["rollover"] = f.rollover;
  report["seed"] = best.seed;
  if (outcomes.size() > 1) {
    Json runs_json = Json::array();
    for (const ScheduleOutcome& o : outcomes) {
      runs_json.push_back({{"seed", o.seed},
                           {"penalized_cost", o.final_cost.penalized_cost},
                           {"fingerprint", o.fingerprint.digest}});
    }
    report["runs"] = std::move(runs_json);
  }
  report["cost_config"] = CostConfigToJson(loaded.cost_cfg);
  Json goals = Json::array();
  for (const GoalOutcome& g : best.goals) goals.push_back(GoalJson(g, mesh));
  report["goals"] = std::move(goals);
  report["cost"] = CostEstimateToJson(best.final_cost);
  report["collectives"] = CollectivesToJson(
      Lower(best.final_state, loaded.cost_cfg.cse_allgather), best.final_state);
  report["plan"] = PlanToJson(
      MakePlan(loaded.start.problem(), best.plan, best.fingerprint));

  if (absl::Status s = Emit(f.input.out, report.dump(2) + "\n", out); !s.ok()) {
    return Report({kExitConfig, s}, err);
  }
  if (!f.trace.empty()) {
    std::string tsv = "goal\ttrajectory\tdepth\tfingerprint\treward\tbest_cost\n";
    for (size_t g = 0; g < best.goals.size(); ++g) {
      for (const TraceRow& row : best.goals[g].trace) {
        absl::StrAppend(&tsv, g, "\t", row.trajectory, "\t", row.depth, "\t",
                        row.fingerprint, "\t", Num(row.reward), "\t",
                        Num(row.best_metric), "\n");
      }
    }
    if (absl::Status s = WriteTextFile(f.trace, tsv); !s.ok()) {
      return Report({kExitConfig, s}, err);
    }
  }
  if (!f.input.out.empty() && f.input.out != "-") {
    const CollectiveCounts& c = best.final_cost.counts;
    out << "seed " << best.seed << ": runtime " << Num(best.final_cost.runtime_seconds)
        << " s, peak " << best.final_cost.peak_memory_bytes << " B, AllReduce "
        << c.all_reduce() << ", AllGather " << c.all_gather()
        << ", ReduceScatter " << c.reduce_scatter() << ", "
        << best.plan.size() << " actions\n";
  }
  return kExitOk;
}

// estimate

struct EstimateFlags {
  InputFlags input;
  std::string plan;
};

int CmdEstimate(const EstimateFlags& f, std::ostream& out, std::ostream& err) {
  Loaded loaded;
  if (auto failure = Load(f.input, &loaded)) return Report(*failure, err);
  ModuleState state = loaded.start;
  if (!f.plan.empty()) {
    absl::StatusOr<Json> j = ReadJsonFile(f.plan);
    if (!j.ok()) return Report({kExitConfig, j.status()}, err);
    // A search report carries its plan under "plan".
    const Json& plan_json =
        j->is_object() && j->contains("plan") ? (*j)["plan"] : *j;
    absl::StatusOr<Plan> plan = PlanFromJson(plan_json);
    if (!plan.ok()) return Report({kExitValidation, plan.status()}, err);
    absl::StatusOr<ModuleState> replayed = ReplayPlan(state, *plan);
    if (!replayed.ok()) return Report({kExitValidation, replayed.status()}, err);
    state = *std::move(replayed);
  }
  Json result;
  result["fingerprint"] = ComputeFingerprint(state).digest;
  result["cost"] = CostEstimateToJson(Estimate(state, loaded.cost_cfg));
  result["collectives"] =
      CollectivesToJson(Lower(state, loaded.cost_cfg.cse_allgather), state);
  if (absl::Status s = Emit(f.input.out, result.dump(2) + "\n", out); !s.ok()) {
    return Report({kExitConfig, s}, err);
  }
  return kExitOk;
}

// oracle

struct OracleFlags {
  InputFlags input;
  std::string axes = "all";
  int max_depth = -1;
  std::string objective = "penalized_runtime";
  bool parallel = false;
};

int CmdOracle(const OracleFlags& f, std::ostream& out, std::ostream& err) {
  Loaded loaded;
  if (auto failure = Load(f.input, &loaded)) return Report(*failure, err);
  const Mesh& mesh = loaded.start.mesh();
  AxisMask axes = 0;
  if (f.axes == "all") {
    axes = mesh.all_axes();
  } else {
    for (absl::string_view name : absl::StrSplit(f.axes, ',')) {
      const std::optional<int> a = mesh.FindAxis(name);
      if (!a.has_value()) {
        return Report({kExitConfig, absl::InvalidArgumentError(absl::StrCat(
                                        "unknown mesh axis '", name, "'"))},
                      err);
      }
      axes |= AxisBit(*a);
    }
  }
  absl::StatusOr<Objective> objective = ParseObjective(f.objective);
  if (!objective.ok()) return Report({kExitConfig, objective.status()}, err);
  absl::StatusOr<Enumeration> e = EnumerateStates(
      loaded.start, axes, f.max_depth, loaded.cost_cfg, f.parallel);
  if (!e.ok()) return Report({kExitConfig, e.status()}, err);
  const std::string csv = EnumerationToCsv(*e, loaded.start.problem());
  if (absl::Status s = Emit(f.input.out, csv, out); !s.ok()) {
    return Report({kExitConfig, s}, err);
  }
  const OracleEntry& best = BestEntry(*e, *objective);
  err << e->states.size() << " states, " << e->action_sequences
      << " action sequences; best " << ObjectiveName(*objective) << " "
      << Num(Metric(best.cost, *objective)) << " at "
      << best.fingerprint.digest << "\n";
  return kExitOk;
}

// dump-graph

int CmdDumpGraph(const InputFlags& f, std::ostream& out, std::ostream& err) {
  Loaded loaded;
  if (auto failure = Load(f, &loaded)) return Report(*failure, err);
  const Json j = GraphToJson(loaded.start.graph(), &loaded.start.mesh());
  if (absl::Status s = Emit(f.out, j.dump(2) + "\n", out); !s.ok()) {
    return Report({kExitConfig, s}, err);
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Goal-oriented SPMD partition search", "meshsearch"};
  app.require_subcommand(1);

  SearchFlags search;
  CLI::App* search_cmd =
      app.add_subcommand("search", "Run a goal schedule and report the plan");
  AddInputFlags(search_cmd, &search.input);
  search_cmd->add_option("--schedule", search.schedule,
                         "Builtin schedule or axis:objective[:budget] list");
  search_cmd->add_option("--budget", search.budget, "Total trajectory budget");
  search_cmd->add_option("--seed", search.seed, "First random seed");
  search_cmd->add_option("--seeds", search.seeds,
                         "Independent seeds; the best result is reported");
  search_cmd->add_flag("--rollover", search.rollover,
                       "Carry unused goal budget to the next goal");
  search_cmd->add_flag("--parallel", search.parallel,
                       "Use the OpenMP kernels");
  search_cmd->add_option("--uct-c", search.uct_c, "UCT exploration constant");
  search_cmd->add_option("--max-depth", search.max_depth,
                         "Episode depth cap (0: number of groups)");
  search_cmd->add_option("--trace", search.trace,
                         "Per-trajectory TSV trace file");

  EstimateFlags estimate;
  CLI::App* estimate_cmd =
      app.add_subcommand("estimate", "Replay a plan and print its cost");
  AddInputFlags(estimate_cmd, &estimate.input);
  estimate_cmd->add_option("--plan", estimate.plan,
                           "Plan JSON or search report (default: empty plan)");

  OracleFlags oracle;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "Enumerate every reachable state of a tiny instance as CSV");
  AddInputFlags(oracle_cmd, &oracle.input);
  oracle_cmd->add_option("--axes", oracle.axes,
                         "Comma-separated mesh axes or 'all'");
  oracle_cmd->add_option("--max-depth", oracle.max_depth,
                         "Action depth limit (negative: unbounded)");
  oracle_cmd->add_option("--objective", oracle.objective,
                         "runtime, memory or penalized_runtime");
  oracle_cmd->add_flag("--parallel", oracle.parallel, "Use the OpenMP kernels");

  InputFlags dump;
  CLI::App* dump_cmd =
      app.add_subcommand("dump-graph", "Write the graph as JSON");
  AddInputFlags(dump_cmd, &dump);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (search_cmd->parsed()) return CmdSearch(search, out, err);
  if (estimate_cmd->parsed()) return CmdEstimate(estimate, out, err);
  if (oracle_cmd->parsed()) return CmdOracle(oracle, out, err);
  return CmdDumpGraph(dump, out, err);
}

}  // namespace meshsearch
