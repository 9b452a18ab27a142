/*
Copyright 2026 The sonotrace Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef SONOTRACE_SCENE_H_
#define SONOTRACE_SCENE_H_

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sonotrace/mesh.h"
#include "sonotrace/vec3.h"

namespace sonotrace {

// Rays start this far past their origin so a bounce does not re-hit the
// surface it left.
inline constexpr double kRayEpsilon = 1e-4;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Scene {
  std::vector<Mesh> meshes;
  std::vector<Material> materials;
  int background = 0;
  double speed_of_sound = 1540.0;  // m/s

  // Index of the material called `name`, or -1.
  int find_material(const std::string& name) const;
};

// Throws std::invalid_argument / MeshError when the scene is inconsistent.
void validate(const Scene& scene);

struct Hit {
  Vec3 position;
  // Flat normal, flipped so that dot(geometric_normal, ray direction) < 0.
  Vec3 geometric_normal;
  double distance_t = 0.0;
  int material_inside = 0;
  int material_outside = 0;
  // True when the ray arrives on the side the winding normal points to.
  bool front_face = true;
  uint32_t triangle_index = 0;  // global index across all meshes
  uint32_t mesh_index = 0;
};

// Moller-Trumbore. Returns the ray parameter in (t_min, t_max] or nothing.
struct TriangleData {
  Vec3 v0;
  Vec3 e1;
  Vec3 e2;
};
std::optional<double> intersect_triangle(const TriangleData& tri,
                                         const Vec3& origin,
                                         const Vec3& direction, double t_min,
                                         double t_max);

// Bounding-volume hierarchy over every triangle of a scene. Immutable after
// construction; queries are safe to run concurrently.
class Accelerator {
 public:
  struct Node {
    Vec3 bounds_lo;
    Vec3 bounds_hi;
    // Leaf: first primitive offset and count > 0. Interior: index of the
    // second child (the first child follows this node), count == 0.
    uint32_t offset = 0;
    uint16_t count = 0;
    uint8_t split_axis = 0;
  };

  explicit Accelerator(const Scene& scene);

  // Nearest hit with distance in (kRayEpsilon, t_max]. Ties resolve to the
  // lowest triangle index.
  std::optional<Hit> intersect(const Vec3& origin, const Vec3& direction,
                               double t_max = kInfinity) const;

  size_t num_triangles() const { return triangles_.size(); }
  size_t num_nodes() const { return nodes_.size(); }
  size_t num_leaves() const;
  const std::vector<Node>& nodes() const { return nodes_; }
  // Primitive order used by the leaves (global triangle indices).
  const std::vector<uint32_t>& primitive_order() const { return order_; }

  const TriangleData& triangle(uint32_t index) const {
    return triangles_[index];
  }
  // Completes a Hit for triangle `index` at ray parameter `t`.
  Hit make_hit(uint32_t index, const Vec3& origin, const Vec3& direction,
               double t) const;

 private:
  struct PrimInfo {
    Vec3 lo;
    Vec3 hi;
    Vec3 centroid;
    uint32_t index;
  };

  uint32_t build(std::vector<PrimInfo>& prims, size_t begin, size_t end);

  std::vector<TriangleData> triangles_;
  std::vector<Vec3> normals_;
  std::vector<uint32_t> mesh_of_;
  std::vector<int> inside_of_;
  int background_ = 0;
  std::vector<Node> nodes_;
  std::vector<uint32_t> order_;
};

inline Accelerator build_accelerator(const Scene& scene) {
  return Accelerator(scene);
}

// (Z1, Z2): impedance of the medium the ray travels in and of the medium
// beyond the interface.
std::pair<double, double> material_pair_at(const Hit& hit, const Scene& scene);

}  // namespace sonotrace

#endif  // SONOTRACE_SCENE_H_
