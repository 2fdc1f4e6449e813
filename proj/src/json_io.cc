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

#include "meshsearch/json_io.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace meshsearch {

namespace {

absl::Status SchemaError(absl::string_view what, const std::exception& e) {
  return absl::InvalidArgumentError(absl::StrCat(what, ": ", e.what()));
}

std::optional<ArgRole> RoleFromString(std::string name) {
  name = absl::AsciiStrToLower(name);
  if (name == "optimizerstate") name = "optimizer_state";
  return ParseArgRole(name);
}

absl::StatusOr<OpKind> OpKindFromJson(const Json& op, int num_operands) {
  const std::string kind = op.at("kind").get<std::string>();
  if (kind == "dot_general") {
    return DotGeneral{op.value("lhs_batch", std::vector<int>{}),
                      op.value("rhs_batch", std::vector<int>{}),
                      op.at("lhs_contracting").get<std::vector<int>>(),
                      op.at("rhs_contracting").get<std::vector<int>>()};
  }
  if (kind == "elementwise") {
    return Elementwise{op.value("op_name", std::string("elementwise")),
                       op.value("arity", num_operands)};
  }
  if (kind == "reduce") {
    const std::string rk = op.value("reduce_kind", std::string("sum"));
    if (rk != "sum" && rk != "max") {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown reduce_kind '", rk, "'"));
    }
    return Reduce{rk == "sum" ? ReduceKind::kSum : ReduceKind::kMax,
                  op.at("dims").get<std::vector<int>>()};
  }
  if (kind == "transpose") {
    return Transpose{op.at("permutation").get<std::vector<int>>()};
  }
  if (kind == "reshape") {
    return Reshape{op.at("target_dims").get<std::vector<int64_t>>()};
  }
  if (kind == "constant") {
    return Constant{{op.at("dims").get<std::vector<int64_t>>(),
                     op.value("element_bytes", int64_t{4})}};
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown op kind '", kind, "'"));
}

void OpAttrsToJson(const OpKind& kind, Json& out) {
  if (const auto* dot = std::get_if<DotGeneral>(&kind)) {
    out["lhs_batch"] = dot->lhs_batch;
    out["rhs_batch"] = dot->rhs_batch;
    out["lhs_contracting"] = dot->lhs_contracting;
    out["rhs_contracting"] = dot->rhs_contracting;
  } else if (const auto* ew = std::get_if<Elementwise>(&kind)) {
    out["op_name"] = ew->name;
  } else if (const auto* reduce = std::get_if<Reduce>(&kind)) {
    out["reduce_kind"] = reduce->kind == ReduceKind::kSum ? "sum" : "max";
    out["dims"] = reduce->dims;
  } else if (const auto* transpose = std::get_if<Transpose>(&kind)) {
    out["permutation"] = transpose->permutation;
  } else if (const auto* reshape = std::get_if<Reshape>(&kind)) {
    out["target_dims"] = reshape->target_dims;
  } else if (const auto* constant = std::get_if<Constant>(&kind)) {
    out["dims"] = constant->type.dims;
    out["element_bytes"] = constant->type.element_bytes;
  }
}

}  // namespace

absl::StatusOr<GraphFile> GraphFromJson(const Json& j) {
  try {
    GraphFile file;
    if (j.contains("mesh")) {
      std::vector<MeshAxis> axes;
      for (const Json& a : j.at("mesh")) {
        axes.push_back({a.at("name").get<std::string>(),
                        a.at("size").get<int64_t>()});
      }
      absl::StatusOr<Mesh> mesh = Mesh::Create(std::move(axes));
      if (!mesh.ok()) return mesh.status();
      file.mesh = *std::move(mesh);
    }

    std::vector<std::string> names;
    absl::flat_hash_map<std::string, int32_t> index;
    std::vector<std::optional<TensorType>> types;
    auto intern = [&](const std::string& name) {
      auto [it, inserted] =
          index.try_emplace(name, static_cast<int32_t>(names.size()));
      if (inserted) {
        names.push_back(name);
        types.emplace_back();
      }
      return ValueId{it->second};
    };

    std::vector<Argument> args;
    for (const Json& a : j.at("args")) {
      const std::string role_name = a.at("role").get<std::string>();
      std::optional<ArgRole> role = RoleFromString(role_name);
      if (!role) {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown argument role '", role_name, "'"));
      }
      TensorType type{a.at("dims").get<std::vector<int64_t>>(),
                      a.value("element_bytes", int64_t{4})};
      ValueId id = intern(a.at("id").get<std::string>());
      if (!types[id.index]) types[id.index] = type;
      args.push_back({id, std::move(type), *role, a.at("group").get<int>()});
    }

    std::vector<Operation> ops;
    for (const Json& o : j.at("ops")) {
      std::vector<ValueId> operands;
      for (const Json& name : o.at("operands")) {
        operands.push_back(intern(name.get<std::string>()));
      }
      absl::StatusOr<OpKind> kind =
          OpKindFromJson(o, static_cast<int>(operands.size()));
      if (!kind.ok()) return kind.status();
      ValueId id = intern(o.at("id").get<std::string>());
      // Interning may grow `types`, so take pointers only afterwards.
      std::vector<const TensorType*> operand_types;
      bool typed = true;
      for (ValueId v : operands) {
        if (types[v.index]) {
          operand_types.push_back(&*types[v.index]);
        } else {
          typed = false;
        }
      }
      TensorType result;
      if (typed) {
        absl::StatusOr<TensorType> inferred =
            InferResultType(*kind, operand_types);
        if (inferred.ok()) result = *std::move(inferred);
      }
      if (!types[id.index]) types[id.index] = result;
      ops.push_back({id, *std::move(kind), std::move(operands), result});
    }

    std::vector<ValueId> outputs;
    for (const Json& name : j.at("outputs")) {
      outputs.push_back(intern(name.get<std::string>()));
    }
    file.graph = Graph(j.value("name", std::string("graph")), std::move(names),
                       std::move(args), std::move(ops), std::move(outputs));
    return file;
  } catch (const Json::exception& e) {
    return SchemaError("malformed graph JSON", e);
  }
}

Json GraphToJson(const Graph& graph, const Mesh* mesh) {
  Json j;
  j["name"] = graph.name();
  if (mesh != nullptr) {
    Json axes = Json::array();
    for (const MeshAxis& a : mesh->axes()) {
      axes.push_back({{"name", a.name}, {"size", a.size}});
    }
    j["mesh"] = std::move(axes);
  }
  Json args = Json::array();
  for (const Argument& a : graph.args()) {
    args.push_back({{"id", graph.value_name(a.id)},
                    {"dims", a.type.dims},
                    {"element_bytes", a.type.element_bytes},
                    {"role", std::string(ArgRoleName(a.role))},
                    {"group", a.group}});
  }
  j["args"] = std::move(args);
  Json ops = Json::array();
  for (const Operation& op : graph.ops()) {
    Json o;
    o["id"] = graph.value_name(op.id);
    o["kind"] = std::string(OpKindName(op.kind));
    Json operands = Json::array();
    for (ValueId v : op.operands) operands.push_back(graph.value_name(v));
    o["operands"] = std::move(operands);
    OpAttrsToJson(op.kind, o);
    ops.push_back(std::move(o));
  }
  j["ops"] = std::move(ops);
  Json outputs = Json::array();
  for (ValueId v : graph.outputs()) outputs.push_back(graph.value_name(v));
  j["outputs"] = std::move(outputs);
  return j;
}

absl::StatusOr<Plan> PlanFromJson(const Json& j) {
  try {
    Plan plan;
    const Json& actions = j.is_array() ? j : j.at("actions");
    for (const Json& a : actions) {
      plan.actions.push_back({a.at("group").get<int>(), a.at("dim").get<int>(),
                              a.at("axis").get<std::string>()});
    }
    if (j.is_object()) plan.fingerprint = j.value("fingerprint", std::string());
    return plan;
  } catch (const Json::exception& e) {
    return SchemaError("malformed plan JSON", e);
  }
}

Json PlanToJson(const Plan& plan) {
  Json actions = Json::array();
  for (const PlanRecord& r : plan.actions) {
    actions.push_back({{"group", r.group}, {"dim", r.dim}, {"axis", r.axis}});
  }
  Json j;
  j["actions"] = std::move(actions);
  j["fingerprint"] = plan.fingerprint;
  return j;
}

Plan MakePlan(const PartitionProblem& problem,
              const std::vector<Action>& actions, const Fingerprint& fp) {
  Plan plan;
  for (const Action& a : actions) {
    plan.actions.push_back({a.group, a.dim, problem.mesh().axis(a.axis).name});
  }
  plan.fingerprint = fp.digest;
  return plan;
}

absl::StatusOr<ModuleState> ReplayPlan(const ModuleState& start,
                                       const Plan& plan) {
  ModuleState state = start;
  for (size_t i = 0; i < plan.actions.size(); ++i) {
    const PlanRecord& r = plan.actions[i];
    std::optional<int> axis = start.mesh().FindAxis(r.axis);
    if (!axis) {
      return absl::InvalidArgumentError(absl::StrCat(
          "plan action ", i, ": unknown mesh axis '", r.axis, "'"));
    }
    absl::StatusOr<ModuleState> next =
        ApplyAction(state, Action{r.group, r.dim, *axis});
    if (!next.ok()) {
      return absl::Status(next.status().code(),
                          absl::StrCat("plan action ", i, ": ",
                                       next.status().message()));
    }
    state = *std::move(next);
  }
  if (!plan.fingerprint.empty()) {
    Fingerprint fp = ComputeFingerprint(state);
    if (fp.digest != plan.fingerprint) {
      return absl::FailedPreconditionError(
          absl::StrCat("replayed fingerprint '", fp.digest,
                       "' differs from recorded '", plan.fingerprint, "'"));
    }
  }
  return state;
}

absl::StatusOr<CostModelConfig> CostConfigFromJson(const Json& j) {
  try {
    if (!j.is_object()) {
      return absl::InvalidArgumentError("cost config must be a JSON object");
    }
    for (const auto& [key, unused] : j.items()) {
      if (key != "flops_per_second" && key != "axes" &&
          key != "memory_limit_bytes" && key != "memory_penalty_slope" &&
          key != "cse_allgather") {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown cost config field '", key, "'"));
      }
    }
    CostModelConfig cfg;
    cfg.flops_per_second = j.value("flops_per_second", cfg.flops_per_second);
    if (j.contains("axes")) {
      for (const Json& a : j.at("axes")) {
        AxisLink link;
        link.bandwidth_bytes_per_second =
            a.value("bandwidth", link.bandwidth_bytes_per_second);
        link.latency_seconds = a.value("latency", link.latency_seconds);
        if (!(link.bandwidth_bytes_per_second > 0) ||
            !(link.latency_seconds >= 0)) {
          return absl::InvalidArgumentError(
              "axis bandwidth must be positive and latency non-negative");
        }
        cfg.axis_links.emplace_back(a.at("name").get<std::string>(), link);
      }
    }
    if (j.contains("memory_limit_bytes") && !j["memory_limit_bytes"].is_null()) {
      cfg.memory_limit_bytes = j["memory_limit_bytes"].get<double>();
    }
    cfg.memory_penalty_slope =
        j.value("memory_penalty_slope", cfg.memory_penalty_slope);
    cfg.cse_allgather = j.value("cse_allgather", cfg.cse_allgather);
    if (!(cfg.flops_per_second > 0)) {
      return absl::InvalidArgumentError("flops_per_second must be positive");
    }
    if (!(cfg.memory_limit_bytes > 0)) {
      return absl::InvalidArgumentError("memory_limit_bytes must be positive");
    }
    if (!(cfg.memory_penalty_slope >= 0)) {
      return absl::InvalidArgumentError(
          "memory_penalty_slope must be non-negative");
    }
    return cfg;
  } catch (const Json::exception& e) {
    return SchemaError("malformed cost config JSON", e);
  }
}

Json CostConfigToJson(const CostModelConfig& cfg) {
  Json j;
  j["flops_per_second"] = cfg.flops_per_second;
  Json axes = Json::array();
  for (const auto& [name, link] : cfg.axis_links) {
    axes.push_back({{"name", name},
                    {"bandwidth", link.bandwidth_bytes_per_second},
                    {"latency", link.latency_seconds}});
  }
  j["axes"] = std::move(axes);
  if (std::isfinite(cfg.memory_limit_bytes)) {
    j["memory_limit_bytes"] = cfg.memory_limit_bytes;
  } else {
    j["memory_limit_bytes"] = nullptr;
  }
  j["memory_penalty_slope"] = cfg.memory_penalty_slope;
  j["cse_allgather"] = cfg.cse_allgather;
  return j;
}

Json CostEstimateToJson(const CostEstimate& est) {
  Json counts;
  for (int k = 0; k < kNumCollectiveKinds; ++k) {
    counts[std::string(CollectiveKindName(static_cast<CollectiveKind>(k)))] =
        est.counts.by_kind[k];
  }
  Json j;
  j["runtime_seconds"] = est.runtime_seconds;
  j["compute_seconds"] = est.compute_seconds;
  j["communication_seconds"] = est.communication_seconds;
  j["peak_memory_bytes"] = est.peak_memory_bytes;
  j["counts"] = std::move(counts);
  j["penalized_cost"] = est.penalized_cost;
  return j;
}

Json CollectivesToJson(const LoweredProgram& program, const ModuleState& s) {
  Json j;
  for (int k = 0; k < kNumCollectiveKinds; ++k) {
    j[std::string(CollectiveKindName(static_cast<CollectiveKind>(k)))] =
        Json::array();
  }
  for (const Collective& c : program.collectives) {
    j[std::string(CollectiveKindName(c.kind))].push_back(
        {{"axis", s.mesh().axis(c.axis).name},
         {"value", s.graph().value_name(c.value)},
         {"payload_bytes", c.payload_bytes},
         {"site", s.graph().value_name(s.graph().ops()[c.site].id)}});
  }
  return j;
}

absl::StatusOr<Json> ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot read '", path, "'"));
  }
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    return SchemaError(absl::StrCat("invalid JSON in '", path, "'"), e);
  }
}

absl::Status WriteTextFile(const std::string& path, absl::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write '", path, "'"));
  }
  out << text;
  out.close();
  if (!out) {
    return absl::DataLossError(absl::StrCat("failed writing '", path, "'"));
  }
  return absl::OkStatus();
}

}  // namespace meshsearch
