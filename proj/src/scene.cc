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

#include "sonotrace/scene.h"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace sonotrace {

namespace {

constexpr int kNumBins = 16;
constexpr size_t kMaxLeafSize = 4;

double surface_area(const Vec3& lo, const Vec3& hi) {
  const Vec3 d = hi - lo;
  if (d.x < 0.0) return 0.0;
  return 2.0 * (d.x * d.y + d.y * d.z + d.z * d.x);
}

// Slab test; returns the entry distance or +inf on a miss.
inline double ray_box(const Vec3& lo, const Vec3& hi, const Vec3& origin,
                      const Vec3& inv_dir, double t_max) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    double tn = (lo[a] - origin[a]) * inv_dir[a];
    double tf = (hi[a] - origin[a]) * inv_dir[a];
    if (tn > tf) std::swap(tn, tf);
    // Guards NaN from 0 * inf when the origin sits on a slab plane.
    t0 = tn > t0 ? tn : t0;
    t1 = tf < t1 ? tf : t1;
    if (t0 > t1) return kInfinity;
  }
  return t0;
}

}  // namespace

int Scene::find_material(const std::string& name) const {
  for (size_t i = 0; i < materials.size(); ++i) {
    if (materials[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void validate(const Scene& scene) {
  if (!(scene.speed_of_sound > 0.0)) {
    throw std::invalid_argument("speed of sound must be > 0");
  }
  if (scene.background < 0 ||
      scene.background >= static_cast<int>(scene.materials.size())) {
    throw std::invalid_argument("background material does not exist");
  }
  for (const Material& m : scene.materials) validate(m);
  for (const Mesh& mesh : scene.meshes) {
    if (mesh.material_id < 0 ||
        mesh.material_id >= static_cast<int>(scene.materials.size())) {
      throw std::invalid_argument("mesh '" + mesh.name +
                                  "' references a missing material");
    }
    validate(mesh);
  }
}

std::optional<double> intersect_triangle(const TriangleData& tri,
                                         const Vec3& origin,
                                         const Vec3& direction, double t_min,
                                         double t_max) {
  const Vec3 p = cross(direction, tri.e2);
  const double det = dot(tri.e1, p);
  if (det == 0.0) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 s = origin - tri.v0;
  const double u = dot(s, p) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = cross(s, tri.e1);
  const double v = dot(direction, q) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = dot(tri.e2, q) * inv_det;
  if (t <= t_min || t > t_max) return std::nullopt;
  return t;
}

Accelerator::Accelerator(const Scene& scene) : background_(scene.background) {
  for (size_t m = 0; m < scene.meshes.size(); ++m) {
    const Mesh& mesh = scene.meshes[m];
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
      const Triangle& tri = mesh.triangles[t];
      const Vec3& a = mesh.vertices[tri[0]];
      triangles_.push_back(
          {a, mesh.vertices[tri[1]] - a, mesh.vertices[tri[2]] - a});
      normals_.push_back(triangle_normal(mesh, t));
      mesh_of_.push_back(static_cast<uint32_t>(m));
      inside_of_.push_back(mesh.material_id);
    }
  }
  if (triangles_.empty()) return;

  std::vector<PrimInfo> prims(triangles_.size());
  for (size_t i = 0; i < triangles_.size(); ++i) {
    const TriangleData& t = triangles_[i];
    const Vec3 b = t.v0 + t.e1;
    const Vec3 c = t.v0 + t.e2;
    prims[i].lo = min(t.v0, min(b, c));
    prims[i].hi = max(t.v0, max(b, c));
    prims[i].centroid = (prims[i].lo + prims[i].hi) * 0.5;
    prims[i].index = static_cast<uint32_t>(i);
  }
  nodes_.reserve(2 * prims.size());
  order_.reserve(prims.size());
  build(prims, 0, prims.size());
}

uint32_t Accelerator::build(std::vector<PrimInfo>& prims, size_t begin,
                            size_t end) {
  const auto node_index = static_cast<uint32_t>(nodes_.size());
  nodes_.emplace_back();

  Vec3 lo = prims[begin].lo;
  Vec3 hi = prims[begin].hi;
  Vec3 clo = prims[begin].centroid;
  Vec3 chi = prims[begin].centroid;
  for (size_t i = begin + 1; i < end; ++i) {
    lo = min(lo, prims[i].lo);
    hi = max(hi, prims[i].hi);
    clo = min(clo, prims[i].centroid);
    chi = max(chi, prims[i].centroid);
  }
  nodes_[node_index].bounds_lo = lo;
  nodes_[node_index].bounds_hi = hi;

  const size_t n = end - begin;
  auto make_leaf = [&] {
    nodes_[node_index].offset = static_cast<uint32_t>(order_.size());
    nodes_[node_index].count = static_cast<uint16_t>(n);
    for (size_t i = begin; i < end; ++i) order_.push_back(prims[i].index);
    return node_index;
  };
  if (n <= kMaxLeafSize) return make_leaf();

  const Vec3 extent = chi - clo;
  int axis = 0;
  if (extent.y > extent[axis]) axis = 1;
  if (extent.z > extent[axis]) axis = 2;
  if (extent[axis] <= 0.0) {
    // All centroids coincide; split by count.
    if (n <= 0xffff) return make_leaf();
    const size_t mid = begin + n / 2;
    nodes_[node_index].split_axis = static_cast<uint8_t>(axis);
    build(prims, begin, mid);
    nodes_[node_index].offset = build(prims, mid, end);
    return node_index;
  }

  struct Bin {
    Vec3 lo{kInfinity, kInfinity, kInfinity};
    Vec3 hi{-kInfinity, -kInfinity, -kInfinity};
    size_t count = 0;
  };
  std::array<Bin, kNumBins> bins;
  const double scale = kNumBins / extent[axis];
  auto bin_of = [&](const PrimInfo& p) {
    int b = static_cast<int>((p.centroid[axis] - clo[axis]) * scale);
    return std::clamp(b, 0, kNumBins - 1);
  };
  for (size_t i = begin; i < end; ++i) {
    Bin& b = bins[bin_of(prims[i])];
    b.lo = min(b.lo, prims[i].lo);
    b.hi = max(b.hi, prims[i].hi);
    ++b.count;
  }

  // Sweep to evaluate SAH cost of each of the kNumBins - 1 split planes.
  std::array<double, kNumBins - 1> cost{};
  {
    Vec3 l_lo = bins[0].lo, l_hi = bins[0].hi;
    size_t l_count = 0;
    for (int i = 0; i < kNumBins - 1; ++i) {
      l_lo = min(l_lo, bins[i].lo);
      l_hi = max(l_hi, bins[i].hi);
      l_count += bins[i].count;
      cost[i] = static_cast<double>(l_count) * surface_area(l_lo, l_hi);
    }
    Vec3 r_lo = bins[kNumBins - 1].lo, r_hi = bins[kNumBins - 1].hi;
    size_t r_count = 0;
    for (int i = kNumBins - 1; i > 0; --i) {
      r_lo = min(r_lo, bins[i].lo);
      r_hi = max(r_hi, bins[i].hi);
      r_count += bins[i].count;
      cost[i - 1] += static_cast<double>(r_count) * surface_area(r_lo, r_hi);
    }
  }
  int best = 0;
  for (int i = 1; i < kNumBins - 1; ++i) {
    if (cost[i] < cost[best]) best = i;
  }
  const double leaf_cost = static_cast<double>(n);
  const double split_cost = 0.125 + cost[best] / surface_area(lo, hi);
  if (n <= 16 && split_cost >= leaf_cost) return make_leaf();

  auto mid_it = std::partition(
      prims.begin() + static_cast<std::ptrdiff_t>(begin),
      prims.begin() + static_cast<std::ptrdiff_t>(end),
      [&](const PrimInfo& p) { return bin_of(p) <= best; });
  size_t mid = static_cast<size_t>(mid_it - prims.begin());
  if (mid == begin || mid == end) mid = begin + n / 2;

  nodes_[node_index].split_axis = static_cast<uint8_t>(axis);
  build(prims, begin, mid);
  nodes_[node_index].offset = build(prims, mid, end);
  return node_index;
}

size_t Accelerator::num_leaves() const {
  return static_cast<size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node& n) { return n.count > 0; }));
}

Hit Accelerator::make_hit(uint32_t index, const Vec3& origin,
                          const Vec3& direction, double t) const {
  Hit hit;
  hit.distance_t = t;
  hit.position = origin + direction * t;
  hit.triangle_index = index;
  hit.mesh_index = mesh_of_[index];
  hit.material_inside = inside_of_[index];
  hit.material_outside = background_;
  const Vec3& n = normals_[index];
  hit.front_face = dot(n, direction) < 0.0;
  hit.geometric_normal = hit.front_face ? n : -n;
  return hit;
}

std::optional<Hit> Accelerator::intersect(const Vec3& origin,
                                          const Vec3& direction,
                                          double t_max) const {
  if (nodes_.empty()) return std::nullopt;
  const Vec3 inv_dir{1.0 / direction.x, 1.0 / direction.y, 1.0 / direction.z};
  const bool dir_neg[3] = {inv_dir.x < 0.0, inv_dir.y < 0.0, inv_dir.z < 0.0};

  double best_t = t_max;
  uint32_t best_index = 0;
  bool found = false;

  uint32_t stack[64];
  int top = 0;
  uint32_t current = 0;
  while (true) {
    const Node& node = nodes_[current];
    if (ray_box(node.bounds_lo, node.bounds_hi, origin, inv_dir, best_t) <
        kInfinity) {
      if (node.count > 0) {
        for (uint32_t i = 0; i < node.count; ++i) {
          const uint32_t prim = order_[node.offset + i];
          const auto t = intersect_triangle(triangles_[prim], origin,
                                            direction, kRayEpsilon, best_t);
          if (t && (!found || *t < best_t ||
                    (*t == best_t && prim < best_index))) {
            best_t = *t;
            best_index = prim;
            found = true;
          }
        }
        if (top == 0) break;
        current = stack[--top];
      } else if (dir_neg[node.split_axis]) {
        stack[top++] = current + 1;
        current = node.offset;
      } else {
        stack[top++] = node.offset;
        current = current + 1;
      }
    } else {
      if (top == 0) break;
      current = stack[--top];
    }
  }
  if (!found) return std::nullopt;
  return make_hit(best_index, origin, direction, best_t);
}

std::pair<double, double> material_pair_at(const Hit& hit,
                                           const Scene& scene) {
  const double inside = scene.materials[hit.material_inside].impedance_z;
  const double outside = scene.materials[hit.material_outside].impedance_z;
  return hit.front_face ? std::pair{outside, inside}
                        : std::pair{inside, outside};
}

}  // namespace sonotrace
