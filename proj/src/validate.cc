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

#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "meshsearch/ir.h"

namespace meshsearch {

namespace {

bool ValidType(const TensorType& t) {
  if (t.element_bytes < 1) return false;
  for (int64_t d : t.dims) {
    if (d < 1) return false;
  }
  return true;
}

}  // namespace

std::vector<Violation> ValidateGraph(const Graph& graph) {
  std::vector<Violation> out;
  auto report = [&](ValueId v, std::string what) {
    out.push_back({graph.value_name(v), std::move(what)});
  };
  // Position at which each value becomes available; args are at -1.
  std::vector<int> defined_at(graph.num_values(), Graph::kUndefined);

  for (const Argument& arg : graph.args()) {
    if (defined_at[arg.id.index] != Graph::kUndefined) {
      report(arg.id, "argument defined more than once");
      continue;
    }
    defined_at[arg.id.index] = Graph::kArgProducer;
    if (!ValidType(arg.type)) {
      report(arg.id, absl::StrCat("invalid argument type ",
                                  arg.type.ToString()));
    }
  }
  for (const EquiShardGroup& group : graph.groups()) {
    const TensorType& first = graph.args()[graph.arg_index(group.members[0])]
                                  .type;
    for (ValueId member : group.members) {
      int ai = graph.arg_index(member);
      if (ai < 0) continue;
      if (graph.args()[ai].type.dims != first.dims) {
        out.push_back({absl::StrCat("group ", group.id),
                       absl::StrCat("member '", graph.value_name(member),
                                    "' has dims ",
                                    graph.args()[ai].type.ToString(),
                                    " but the group expects ",
                                    first.ToString())});
        break;
      }
    }
  }

  for (int i = 0; i < static_cast<int>(graph.ops().size()); ++i) {
    const Operation& op = graph.ops()[i];
    bool operands_ok = true;
    for (ValueId operand : op.operands) {
      int at = defined_at[operand.index];
      if (at == Graph::kUndefined) {
        report(operand, absl::StrCat("used by op '", graph.value_name(op.id),
                                     "' before any definition"));
        operands_ok = false;
      }
    }
    if (defined_at[op.id.index] != Graph::kUndefined) {
      report(op.id, "value defined more than once");
      continue;
    }
    defined_at[op.id.index] = i;
    if (!ValidType(op.result_type)) {
      report(op.id,
             absl::StrCat("invalid result type ", op.result_type.ToString()));
      continue;
    }
    if (!operands_ok) continue;
    std::vector<const TensorType*> operand_types;
    for (ValueId operand : op.operands) {
      operand_types.push_back(graph.value_type(operand));
    }
    absl::StatusOr<TensorType> inferred =
        InferResultType(op.kind, operand_types);
    if (!inferred.ok()) {
      report(op.id, std::string(inferred.status().message()));
    } else if (*inferred != op.result_type) {
      report(op.id, absl::StrCat("declared result type ",
                                 op.result_type.ToString(),
                                 " differs from inferred ",
                                 inferred->ToString()));
    }
  }

  for (ValueId output : graph.outputs()) {
    if (defined_at[output.index] == Graph::kUndefined) {
      report(output, "output is never defined");
    }
  }
  return out;
}

}  // namespace meshsearch
