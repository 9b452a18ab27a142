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

#include "sonotrace/mesh.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sonotrace {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw MeshError("line " + std::to_string(line) + ": bad number '" +
                        std::string(tok) + "'",
                    line);
  }
  return v;
}

// Position index from a `i`, `i/t` or `i/t/n` face token. Returns 0-based.
uint32_t parse_face_index(std::string_view tok, size_t num_vertices, int line) {
  const std::string_view head = tok.substr(0, tok.find('/'));
  long long idx = 0;
  const auto [ptr, ec] =
      std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc() || ptr != head.data() + head.size()) {
    throw MeshError("line " + std::to_string(line) + ": bad face index '" +
                        std::string(tok) + "'",
                    line);
  }
  if (idx < 1 || static_cast<size_t>(idx) > num_vertices) {
    throw MeshError("line " + std::to_string(line) + ": face index " +
                        std::to_string(idx) + " out of range [1, " +
                        std::to_string(num_vertices) + "]",
                    line);
  }
  return static_cast<uint32_t>(idx - 1);
}

void orient_outward(Mesh* mesh) {
  Vec3 centroid;
  for (const Vec3& v : mesh->vertices) centroid += v;
  centroid = centroid / static_cast<double>(mesh->vertices.size());
  for (size_t t = 0; t < mesh->triangles.size(); ++t) {
    const Triangle& tri = mesh->triangles[t];
    const Vec3 mid = (mesh->vertices[tri[0]] + mesh->vertices[tri[1]] +
                      mesh->vertices[tri[2]]) /
                     3.0;
    if (dot(triangle_normal(*mesh, t), mid - centroid) < 0.0) {
      std::swap(mesh->triangles[t][1], mesh->triangles[t][2]);
    }
  }
}

void add_quad(Mesh* mesh, uint32_t a, uint32_t b, uint32_t c, uint32_t d) {
  mesh->triangles.push_back({a, b, c});
  mesh->triangles.push_back({a, c, d});
}

}  // namespace

void validate(const Material& material) {
  if (!(material.impedance_z > 0.0) || !std::isfinite(material.impedance_z)) {
    throw std::invalid_argument("material '" + material.name +
                                "': impedance must be > 0");
  }
  if (!(material.roughness_alpha > 0.0) || material.roughness_alpha > 1.0) {
    throw std::invalid_argument("material '" + material.name +
                                "': roughness must be in (0, 1]");
  }
}

double triangle_area(const Mesh& mesh, size_t tri) {
  const Triangle& t = mesh.triangles[tri];
  const Vec3 e1 = mesh.vertices[t[1]] - mesh.vertices[t[0]];
  const Vec3 e2 = mesh.vertices[t[2]] - mesh.vertices[t[0]];
  return 0.5 * length(cross(e1, e2));
}

Vec3 triangle_normal(const Mesh& mesh, size_t tri) {
  const Triangle& t = mesh.triangles[tri];
  const Vec3 e1 = mesh.vertices[t[1]] - mesh.vertices[t[0]];
  const Vec3 e2 = mesh.vertices[t[2]] - mesh.vertices[t[0]];
  return normalize(cross(e1, e2));
}

void validate(const Mesh& mesh) {
  const size_t nv = mesh.vertices.size();
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (uint32_t idx : mesh.triangles[t]) {
      if (idx >= nv) {
        throw MeshError("mesh '" + mesh.name + "': triangle " +
                            std::to_string(t) + " references vertex " +
                            std::to_string(idx) + " of " + std::to_string(nv),
                        0);
      }
    }
    const double area = triangle_area(mesh, t);
    if (!(area > kMinTriangleArea)) {
      throw MeshError("mesh '" + mesh.name + "': triangle " +
                          std::to_string(t) + " is degenerate (area " +
                          std::to_string(area) + " m^2)",
                      0);
    }
  }
}

Mesh parse_wavefront(const std::string& text, const std::string& name) {
  Mesh mesh;
  mesh.name = name;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) {
        throw MeshError("line " + std::to_string(line_no) +
                            ": vertex needs 3 coordinates",
                        line_no);
      }
      mesh.vertices.push_back({parse_double(tokens[1], line_no),
                               parse_double(tokens[2], line_no),
                               parse_double(tokens[3], line_no)});
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) {
        throw MeshError("line " + std::to_string(line_no) +
                            ": face needs at least 3 vertices",
                        line_no);
      }
      std::vector<uint32_t> poly;
      for (size_t i = 1; i < tokens.size(); ++i) {
        poly.push_back(
            parse_face_index(tokens[i], mesh.vertices.size(), line_no));
      }
      const size_t first = mesh.triangles.size();
      for (size_t i = 1; i + 1 < poly.size(); ++i) {
        mesh.triangles.push_back({poly[0], poly[i], poly[i + 1]});
      }
      for (size_t t = first; t < mesh.triangles.size(); ++t) {
        const double area = triangle_area(mesh, t);
        if (!(area > kMinTriangleArea)) {
          throw MeshError("line " + std::to_string(line_no) +
                              ": degenerate triangle (area " +
                              std::to_string(area) + " m^2)",
                          line_no);
        }
      }
    }
    // Other record types (vn, vt, o, g, usemtl, ...) are ignored.
  }
  return mesh;
}

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  if (format != MeshFormat::kWavefront) {
    throw MeshError("unsupported mesh format", 0);
  }
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string(), 0);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_wavefront(buf.str(), path.stem().string());
  } catch (const MeshError& e) {
    throw MeshError(path.string() + ": " + e.what(), e.line());
  }
}

void write_wavefront(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "# " << mesh.name << "\n";
  for (const Vec3& v : mesh.vertices) {
    out << "v " << v.x << " " << v.y << " " << v.z << "\n";
  }
  for (const Triangle& t : mesh.triangles) {
    out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
  }
}

Mesh make_box(const std::string& name, const Vec3& lo, const Vec3& hi) {
  Mesh mesh;
  mesh.name = name;
  for (int i = 0; i < 8; ++i) {
    mesh.vertices.push_back({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y,
                             (i & 4) ? hi.z : lo.z});
  }
  add_quad(&mesh, 0, 2, 3, 1);  // z = lo
  add_quad(&mesh, 4, 5, 7, 6);  // z = hi
  add_quad(&mesh, 0, 1, 5, 4);  // y = lo
  add_quad(&mesh, 2, 6, 7, 3);  // y = hi
  add_quad(&mesh, 0, 4, 6, 2);  // x = lo
  add_quad(&mesh, 1, 3, 7, 5);  // x = hi
  orient_outward(&mesh);
  return mesh;
}

Mesh make_tilted_box(const std::string& name, const Vec3& lo, const Vec3& hi,
                     double angle) {
  Mesh mesh = make_box(name, lo, hi);
  const Vec3 c = (lo + hi) * 0.5;
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  for (Vec3& v : mesh.vertices) {
    const Vec3 d = v - c;
    v = c + Vec3{cs * d.x + sn * d.z, d.y, -sn * d.x + cs * d.z};
  }
  return mesh;
}

Mesh make_sphere(const std::string& name, const Vec3& center, double radius,
                 int rings, int segments) {
  Mesh mesh;
  mesh.name = name;
  mesh.vertices.push_back(center + Vec3{0, 0, radius});
  for (int r = 1; r < rings; ++r) {
    const double theta = kPi * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * kPi * s / segments;
      mesh.vertices.push_back(
          center + radius * Vec3{std::sin(theta) * std::cos(phi),
                                 std::sin(theta) * std::sin(phi),
                                 std::cos(theta)});
    }
  }
  const auto south = static_cast<uint32_t>(mesh.vertices.size());
  mesh.vertices.push_back(center - Vec3{0, 0, radius});
  auto ring_vertex = [&](int r, int s) {
    return static_cast<uint32_t>(1 + (r - 1) * segments + (s % segments));
  };
  for (int s = 0; s < segments; ++s) {
    mesh.triangles.push_back({0, ring_vertex(1, s), ring_vertex(1, s + 1)});
  }
  for (int r = 1; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      add_quad(&mesh, ring_vertex(r, s), ring_vertex(r + 1, s),
               ring_vertex(r + 1, s + 1), ring_vertex(r, s + 1));
    }
  }
  for (int s = 0; s < segments; ++s) {
    mesh.triangles.push_back(
        {south, ring_vertex(rings - 1, s + 1), ring_vertex(rings - 1, s)});
  }
  orient_outward(&mesh);
  return mesh;
}

Mesh make_quad_z(const std::string& name, double x0, double x1, double y0,
                 double y1, double z) {
  Mesh mesh;
  mesh.name = name;
  mesh.vertices = {{x0, y0, z}, {x0, y1, z}, {x1, y1, z}, {x1, y0, z}};
  add_quad(&mesh, 0, 1, 2, 3);
  return mesh;
}

}  // namespace sonotrace
