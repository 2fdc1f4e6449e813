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

#include "meshsearch/ir.h"

#include <algorithm>
#include <map>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace meshsearch {

int64_t TensorType::num_elements() const {
  int64_t n = 1;
  for (int64_t d : dims) n *= d;
  return n;
}

std::string TensorType::ToString() const {
  return absl::StrCat("[", absl::StrJoin(dims, ","), "]x", element_bytes);
}

AxisMask Sharding::used_axes() const {
  AxisMask used = partial;
  for (AxisMask m : per_dim) used |= m;
  return used;
}

bool Sharding::is_single_use() const {
  AxisMask seen = partial;
  for (AxisMask m : per_dim) {
    if ((seen & m) != 0) return false;
    seen |= m;
  }
  return true;
}

std::string Sharding::ToString(const Mesh& mesh) const {
  auto mask_names = [&](AxisMask mask) {
    std::vector<std::string> names;
    ForEachAxis(mask, [&](int a) { names.push_back(mesh.axis(a).name); });
    return names.empty() ? std::string("_") : absl::StrJoin(names, "+");
  };
  std::string out = absl::StrCat(
      "[", absl::StrJoin(per_dim, ",", [&](std::string* s, AxisMask m) {
        s->append(mask_names(m));
      }),
      "]");
  if (partial != 0) absl::StrAppend(&out, "{partial:", mask_names(partial), "}");
  return out;
}

absl::StatusOr<TensorType> LocalShape(const TensorType& type,
                                      const Sharding& sharding,
                                      const Mesh& mesh) {
  if (static_cast<int>(sharding.per_dim.size()) != type.rank()) {
    return absl::InvalidArgumentError(
        absl::StrCat("sharding has ", sharding.per_dim.size(),
                     " dims but the tensor has rank ", type.rank()));
  }
  TensorType local = type;
  for (int d = 0; d < type.rank(); ++d) {
    int64_t parts = mesh.MaskSize(sharding.per_dim[d]);
    if (type.dims[d] % parts != 0) {
      std::vector<std::string> names;
      ForEachAxis(sharding.per_dim[d],
                  [&](int a) { names.push_back(mesh.axis(a).name); });
      return absl::InvalidArgumentError(absl::StrCat(
          "dim ", d, " of size ", type.dims[d],
          " is not divisible by the product ", parts, " of axes {",
          absl::StrJoin(names, ","), "}"));
    }
    local.dims[d] = type.dims[d] / parts;
  }
  return local;
}

absl::string_view OpKindName(const OpKind& kind) {
  static constexpr absl::string_view kNames[] = {
      "dot_general", "elementwise", "reduce", "transpose", "reshape",
      "constant"};
  return kNames[kind.index()];
}

std::vector<int> FreeDims(int rank, const std::vector<int>& batch,
                          const std::vector<int>& contracting) {
  std::vector<int> free;
  for (int d = 0; d < rank; ++d) {
    if (std::find(batch.begin(), batch.end(), d) == batch.end() &&
        std::find(contracting.begin(), contracting.end(), d) ==
            contracting.end()) {
      free.push_back(d);
    }
  }
  return free;
}

namespace {

absl::Status CheckDims(const std::vector<int>& dims, int rank,
                       absl::string_view what) {
  std::vector<bool> seen(rank, false);
  for (int d : dims) {
    if (d < 0 || d >= rank) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, " dim ", d, " out of range for rank ", rank));
    }
    if (seen[d]) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, " dim ", d, " listed twice"));
    }
    seen[d] = true;
  }
  return absl::OkStatus();
}

absl::StatusOr<TensorType> InferDot(const DotGeneral& dot,
                                    const TensorType& lhs,
                                    const TensorType& rhs) {
  if (dot.lhs_batch.size() != dot.rhs_batch.size()) {
    return absl::InvalidArgumentError("batch dim lists differ in length");
  }
  if (dot.lhs_contracting.size() != dot.rhs_contracting.size()) {
    return absl::InvalidArgumentError("contracting dim lists differ in length");
  }
  std::vector<int> lhs_dims = dot.lhs_batch;
  lhs_dims.insert(lhs_dims.end(), dot.lhs_contracting.begin(),
                  dot.lhs_contracting.end());
  std::vector<int> rhs_dims = dot.rhs_batch;
  rhs_dims.insert(rhs_dims.end(), dot.rhs_contracting.begin(),
                  dot.rhs_contracting.end());
  if (absl::Status s = CheckDims(lhs_dims, lhs.rank(), "lhs"); !s.ok()) return s;
  if (absl::Status s = CheckDims(rhs_dims, rhs.rank(), "rhs"); !s.ok()) return s;
  TensorType result{{}, lhs.element_bytes};
  for (size_t k = 0; k < dot.lhs_batch.size(); ++k) {
    int64_t l = lhs.dims[dot.lhs_batch[k]];
    int64_t r = rhs.dims[dot.rhs_batch[k]];
    if (l != r) {
      return absl::InvalidArgumentError(absl::StrCat(
          "batch dims ", dot.lhs_batch[k], "/", dot.rhs_batch[k],
          " have different sizes ", l, " and ", r));
    }
    result.dims.push_back(l);
  }
  for (size_t k = 0; k < dot.lhs_contracting.size(); ++k) {
    int64_t l = lhs.dims[dot.lhs_contracting[k]];
    int64_t r = rhs.dims[dot.rhs_contracting[k]];
    if (l != r) {
      return absl::InvalidArgumentError(absl::StrCat(
          "contracting dims ", dot.lhs_contracting[k], "/",
          dot.rhs_contracting[k], " have different sizes ", l, " and ", r));
    }
  }
  for (int d : FreeDims(lhs.rank(), dot.lhs_batch, dot.lhs_contracting)) {
    result.dims.push_back(lhs.dims[d]);
  }
  for (int d : FreeDims(rhs.rank(), dot.rhs_batch, dot.rhs_contracting)) {
    result.dims.push_back(rhs.dims[d]);
  }
  return result;
}

}  // namespace

absl::StatusOr<TensorType> InferResultType(
    const OpKind& kind, const std::vector<const TensorType*>& operands) {
  auto expect_arity = [&](size_t n) -> absl::Status {
    if (operands.size() != n) {
      return absl::InvalidArgumentError(
          absl::StrCat(OpKindName(kind), " expects ", n, " operand(s), got ",
                       operands.size()));
    }
    return absl::OkStatus();
  };
  if (const auto* dot = std::get_if<DotGeneral>(&kind)) {
    if (absl::Status s = expect_arity(2); !s.ok()) return s;
    return InferDot(*dot, *operands[0], *operands[1]);
  }
  if (const auto* ew = std::get_if<Elementwise>(&kind)) {
    if (ew->arity != 1 && ew->arity != 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("elementwise arity must be 1 or 2, got ", ew->arity));
    }
    if (absl::Status s = expect_arity(ew->arity); !s.ok()) return s;
    if (ew->arity == 2 && operands[0]->dims != operands[1]->dims) {
      return absl::InvalidArgumentError(absl::StrCat(
          "binary elementwise '", ew->name, "' operand shapes differ: ",
          operands[0]->ToString(), " vs ", operands[1]->ToString()));
    }
    return *operands[0];
  }
  if (const auto* reduce = std::get_if<Reduce>(&kind)) {
    if (absl::Status s = expect_arity(1); !s.ok()) return s;
    const TensorType& in = *operands[0];
    if (absl::Status s = CheckDims(reduce->dims, in.rank(), "reduce");
        !s.ok()) {
      return s;
    }
    TensorType result{{}, in.element_bytes};
    for (int d = 0; d < in.rank(); ++d) {
      if (std::find(reduce->dims.begin(), reduce->dims.end(), d) ==
          reduce->dims.end()) {
        result.dims.push_back(in.dims[d]);
      }
    }
    return result;
  }
  if (const auto* transpose = std::get_if<Transpose>(&kind)) {
    if (absl::Status s = expect_arity(1); !s.ok()) return s;
    const TensorType& in = *operands[0];
    if (static_cast<int>(transpose->permutation.size()) != in.rank()) {
      return absl::InvalidArgumentError("permutation length differs from rank");
    }
    if (absl::Status s = CheckDims(transpose->permutation, in.rank(),
                                   "permutation");
        !s.ok()) {
      return s;
    }
    TensorType result{{}, in.element_bytes};
    for (int d : transpose->permutation) result.dims.push_back(in.dims[d]);
    return result;
  }
  if (const auto* reshape = std::get_if<Reshape>(&kind)) {
    if (absl::Status s = expect_arity(1); !s.ok()) return s;
    TensorType result{reshape->target_dims, operands[0]->element_bytes};
    for (int64_t d : result.dims) {
      if (d < 1) return absl::InvalidArgumentError("reshape dims must be >= 1");
    }
    if (result.num_elements() != operands[0]->num_elements()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "reshape changes element count: ", operands[0]->ToString(), " -> ",
          result.ToString()));
    }
    return result;
  }
  const auto& constant = std::get<Constant>(kind);
  if (absl::Status s = expect_arity(0); !s.ok()) return s;
  return constant.type;
}

absl::string_view ArgRoleName(ArgRole role) {
  switch (role) {
    case ArgRole::kParameter:
      return "parameter";
    case ArgRole::kOptimizerState:
      return "optimizer_state";
    case ArgRole::kData:
      return "data";
  }
  return "data";
}

std::optional<ArgRole> ParseArgRole(absl::string_view name) {
  if (name == "parameter") return ArgRole::kParameter;
  if (name == "optimizer_state") return ArgRole::kOptimizerState;
  if (name == "data") return ArgRole::kData;
  return std::nullopt;
}

Graph::Graph(std::string name, std::vector<std::string> value_names,
             std::vector<Argument> args, std::vector<Operation> ops,
             std::vector<ValueId> outputs)
    : name_(std::move(name)),
      value_names_(std::move(value_names)),
      args_(std::move(args)),
      ops_(std::move(ops)),
      outputs_(std::move(outputs)) {
  const int n = num_values();
  for (int i = 0; i < n; ++i) name_index_.try_emplace(value_names_[i], i);
  producer_.assign(n, kUndefined);
  arg_index_.assign(n, -1);
  users_.assign(n, {});
  is_output_.assign(n, false);
  for (int i = 0; i < static_cast<int>(args_.size()); ++i) {
    int v = args_[i].id.index;
    if (producer_[v] == kUndefined) {
      producer_[v] = kArgProducer;
      arg_index_[v] = i;
    }
  }
  for (int i = 0; i < static_cast<int>(ops_.size()); ++i) {
    int v = ops_[i].id.index;
    if (producer_[v] == kUndefined) producer_[v] = i;
    for (ValueId operand : ops_[i].operands) {
      std::vector<int>& users = users_[operand.index];
      if (users.empty() || users.back() != i) users.push_back(i);
    }
  }
  for (ValueId out : outputs_) is_output_[out.index] = true;

  std::map<int, EquiShardGroup> groups;
  for (const Argument& arg : args_) {
    EquiShardGroup& g = groups[arg.group];
    g.id = arg.group;
    g.members.push_back(arg.id);
  }
  for (auto& [id, g] : groups) groups_.push_back(std::move(g));
}

std::optional<ValueId> Graph::FindValue(absl::string_view name) const {
  auto it = name_index_.find(name);
  if (it == name_index_.end()) return std::nullopt;
  return ValueId{it->second};
}

const TensorType* Graph::value_type(ValueId id) const {
  int p = producer_[id.index];
  if (p == kArgProducer) return &args_[arg_index_[id.index]].type;
  if (p >= 0) return &ops_[p].result_type;
  return nullptr;
}

int Graph::group_index(int group_id) const {
  auto it = std::lower_bound(
      groups_.begin(), groups_.end(), group_id,
      [](const EquiShardGroup& g, int id) { return g.id < id; });
  if (it == groups_.end() || it->id != group_id) return -1;
  return static_cast<int>(it - groups_.begin());
}

ValueId GraphBuilder::Intern(absl::string_view name) {
  auto [it, inserted] =
      index_.try_emplace(std::string(name), static_cast<int32_t>(names_.size()));
  if (inserted) {
    names_.emplace_back(name);
    types_.emplace_back();
  } else if (status_.ok()) {
    status_ = absl::InvalidArgumentError(
        absl::StrCat("value '", name, "' defined twice"));
  }
  return ValueId{it->second};
}

ValueId GraphBuilder::AddArg(absl::string_view name, TensorType type,
                             ArgRole role, int group) {
  ValueId id = Intern(name);
  types_[id.index] = type;
  args_.push_back({id, std::move(type), role, group});
  return id;
}

ValueId GraphBuilder::AddOp(absl::string_view name, OpKind kind,
                            std::vector<ValueId> operands) {
  std::vector<const TensorType*> operand_types;
  for (ValueId v : operands) operand_types.push_back(&types_[v.index]);
  absl::StatusOr<TensorType> result = InferResultType(kind, operand_types);
  ValueId id = Intern(name);
  if (!result.ok()) {
    if (status_.ok()) {
      status_ = absl::InvalidArgumentError(
          absl::StrCat("op '", name, "': ", result.status().message()));
    }
    return id;
  }
  types_[id.index] = *result;
  ops_.push_back({id, std::move(kind), std::move(operands), *result});
  return id;
}

ValueId GraphBuilder::Dot(absl::string_view name, ValueId lhs, ValueId rhs,
                          std::vector<int> lhs_contracting,
                          std::vector<int> rhs_contracting,
                          std::vector<int> lhs_batch,
                          std::vector<int> rhs_batch) {
  return AddOp(name,
               DotGeneral{std::move(lhs_batch), std::move(rhs_batch),
                          std::move(lhs_contracting),
                          std::move(rhs_contracting)},
               {lhs, rhs});
}

ValueId GraphBuilder::Unary(absl::string_view name, std::string op_name,
                            ValueId x) {
  return AddOp(name, Elementwise{std::move(op_name), 1}, {x});
}

ValueId GraphBuilder::Binary(absl::string_view name, std::string op_name,
                             ValueId x, ValueId y) {
  return AddOp(name, Elementwise{std::move(op_name), 2}, {x, y});
}

ValueId GraphBuilder::Transposed(absl::string_view name, ValueId x,
                                 std::vector<int> permutation) {
  return AddOp(name, Transpose{std::move(permutation)}, {x});
}

absl::StatusOr<Graph> GraphBuilder::Build() && {
  if (!status_.ok()) return status_;
  return Graph(std::move(name_), std::move(names_), std::move(args_),
               std::move(ops_), std::move(outputs_));
}

}  // namespace meshsearch
