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

#ifndef MESHSEARCH_MESH_H_
#define MESHSEARCH_MESH_H_

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace meshsearch {

// Set of mesh axes, bit i standing for the i-th declared axis.
using AxisMask = uint32_t;

inline constexpr int kMaxMeshAxes = 32;

inline constexpr AxisMask AxisBit(int axis) { return AxisMask{1} << axis; }

inline int AxisCount(AxisMask mask) { return std::popcount(mask); }

// Calls `fn(axis)` for each set bit in ascending axis order.
template <typename Fn>
void ForEachAxis(AxisMask mask, Fn&& fn) {
  while (mask != 0) {
    int axis = std::countr_zero(mask);
    fn(axis);
    mask &= mask - 1;
  }
}

struct MeshAxis {
  std::string name;
  int64_t size = 0;

  friend bool operator==(const MeshAxis&, const MeshAxis&) = default;
};

// A named, ordered logical device mesh such as {batch:4, model:8}.
class Mesh {
 public:
  Mesh() = default;

  // Fails on empty or duplicate names, sizes below 2, or too many axes.
  static absl::StatusOr<Mesh> Create(std::vector<MeshAxis> axes);

  // Parses "batch=2,model=4".
  static absl::StatusOr<Mesh> Parse(absl::string_view text);

  int num_axes() const { return static_cast<int>(axes_.size()); }
  const std::vector<MeshAxis>& axes() const { return axes_; }
  const MeshAxis& axis(int i) const { return axes_[i]; }
  int64_t axis_size(int i) const { return axes_[i].size; }
  std::optional<int> FindAxis(absl::string_view name) const;
  AxisMask all_axes() const {
    return axes_.size() == kMaxMeshAxes ? ~AxisMask{0}
                                        : AxisBit(num_axes()) - 1;
  }

  // Product of the sizes of the axes in `mask`.
  int64_t MaskSize(AxisMask mask) const;
  int64_t num_devices() const { return MaskSize(all_axes()); }

  std::string ToString() const;

  friend bool operator==(const Mesh&, const Mesh&) = default;

 private:
  explicit Mesh(std::vector<MeshAxis> axes) : axes_(std::move(axes)) {}

  std::vector<MeshAxis> axes_;
};

// Total device count of the mesh.
int64_t MeshDevices(const Mesh& mesh);

}  // namespace meshsearch

#endif  // MESHSEARCH_MESH_H_
