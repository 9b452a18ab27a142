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

#ifndef SONOTRACE_MESH_H_
#define SONOTRACE_MESH_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "sonotrace/vec3.h"

namespace sonotrace {

// Acoustic properties of a medium. Impedance in MRayl.
struct Material {
  std::string name;
  double impedance_z = 1.54;
  double roughness_alpha = 0.5;
};

// Throws std::invalid_argument when the impedance or roughness is out of range.
void validate(const Material& material);

using Triangle = std::array<uint32_t, 3>;

struct Mesh {
  std::string name;
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  // Index into Scene::materials; the material fills the side the triangle
  // normals point away from.
  int material_id = 0;
};

// Minimum accepted triangle area in m^2.
inline constexpr double kMinTriangleArea = 1e-12;

double triangle_area(const Mesh& mesh, size_t tri);

// Unit normal from the winding order (counter-clockwise = front).
Vec3 triangle_normal(const Mesh& mesh, size_t tri);

class MeshError : public std::runtime_error {
 public:
  MeshError(const std::string& what, int line)
      : std::runtime_error(what), line_(line) {}
  // 1-based line in the source file, 0 when not tied to a line.
  int line() const { return line_; }

 private:
  int line_;
};

enum class MeshFormat { kWavefront };

// Parses `v x y z` and `f i j k [l ...]` lines (1-based indices, `i/t/n`
// tokens accepted, only the position index is used). Polygons are fan
// triangulated. Throws MeshError on malformed input, out-of-range indices or
// degenerate triangles.
Mesh load_mesh(const std::filesystem::path& path,
               MeshFormat format = MeshFormat::kWavefront);
Mesh parse_wavefront(const std::string& text, const std::string& name);

// Throws MeshError if an index is out of range or a triangle is degenerate.
void validate(const Mesh& mesh);

void write_wavefront(const Mesh& mesh, const std::filesystem::path& path);

// Axis-aligned box with outward-facing winding.
Mesh make_box(const std::string& name, const Vec3& lo, const Vec3& hi);

// Box rotated about the y axis (elevation direction) by `angle` radians
// around its own center.
Mesh make_tilted_box(const std::string& name, const Vec3& lo, const Vec3& hi,
                     double angle);

// Closed UV sphere with outward-facing winding.
Mesh make_sphere(const std::string& name, const Vec3& center, double radius,
                 int rings, int segments);

// Single open quad in the z = `z` plane facing -z.
Mesh make_quad_z(const std::string& name, double x0, double x1, double y0,
                 double y1, double z);

}  // namespace sonotrace

#endif  // SONOTRACE_MESH_H_
