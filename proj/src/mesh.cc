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

#include "meshsearch/mesh.h"

#include <utility>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace meshsearch {

absl::StatusOr<Mesh> Mesh::Create(std::vector<MeshAxis> axes) {
  if (axes.empty()) {
    return absl::InvalidArgumentError("mesh must have at least one axis");
  }
  if (axes.size() > kMaxMeshAxes) {
    return absl::InvalidArgumentError(
        absl::StrCat("mesh has ", axes.size(), " axes; at most ",
                     kMaxMeshAxes, " are supported"));
  }
  for (size_t i = 0; i < axes.size(); ++i) {
    if (axes[i].name.empty()) {
      return absl::InvalidArgumentError("mesh axis names must be non-empty");
    }
    if (axes[i].size < 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("mesh axis '", axes[i].name, "' has size ",
                       axes[i].size, "; axis sizes must be at least 2"));
    }
    for (size_t j = 0; j < i; ++j) {
      if (axes[j].name == axes[i].name) {
        return absl::InvalidArgumentError(
            absl::StrCat("duplicate mesh axis name '", axes[i].name, "'"));
      }
    }
  }
  return Mesh(std::move(axes));
}

absl::StatusOr<Mesh> Mesh::Parse(absl::string_view text) {
  std::vector<MeshAxis> axes;
  for (absl::string_view item :
       absl::StrSplit(text, ',', absl::SkipWhitespace())) {
    std::pair<absl::string_view, absl::string_view> kv =
        absl::StrSplit(item, absl::MaxSplits('=', 1));
    absl::string_view name = absl::StripAsciiWhitespace(kv.first);
    int64_t size = 0;
    if (!absl::SimpleAtoi(kv.second, &size)) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed mesh entry '", item, "'; expected name=size"));
    }
    axes.push_back({std::string(name), size});
  }
  return Create(std::move(axes));
}

std::optional<int> Mesh::FindAxis(absl::string_view name) const {
  for (int i = 0; i < num_axes(); ++i) {
    if (axes_[i].name == name) return i;
  }
  return std::nullopt;
}

int64_t Mesh::MaskSize(AxisMask mask) const {
  int64_t product = 1;
  ForEachAxis(mask, [&](int axis) { product *= axes_[axis].size; });
  return product;
}

std::string Mesh::ToString() const {
  return absl::StrJoin(axes_, ",", [](std::string* out, const MeshAxis& a) {
    absl::StrAppend(out, a.name, "=", a.size);
  });
}

int64_t MeshDevices(const Mesh& mesh) { return mesh.num_devices(); }

}  // namespace meshsearch
