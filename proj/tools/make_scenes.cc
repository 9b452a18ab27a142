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

// Writes the bundled example scenes (OBJ meshes plus a config per scene).
//
//   make_scenes <output dir>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sonotrace/mesh.h"

namespace {

namespace fs = std::filesystem;
using sonotrace::Mesh;
using sonotrace::Vec3;

struct Example {
  std::string name;
  std::vector<Mesh> meshes;
  std::string comment;
  double z_min;  // imaged depth range, m
  double z_max;
};

std::string config_text(const Example& ex) {
  std::string s = "; " + ex.comment + "\n";
  s += "[scene]\nbackground = water\n";
  for (const Mesh& m : ex.meshes) {
    s += "mesh." + m.name + " = " + ex.name + "_" + m.name + ".obj, bone\n";
  }
  s +=
      "\n[materials]\n"
      "water = 1.54\n"
      "bone = 7.8, 0.5\n"
      "\n[transducer]\n"
      "elements = 128\n"
      "radius = 0.06\n"
      "opening_angle_deg = 70\n"
      "center_frequency = 5e6\n"
      "\n[acquisition]\n"
      "angles_deg = linspace(-30, 30, 25)\n"
      "sampling_frequency = 50e6\n"
      "cycles = 5\n"
      "dynamic_range_db = 90\n"
      // Aperture gating keeps far elements, which only hear along their own
      // normals, from smearing echoes across depth.
      "f_number = 1.5\n"
      "apodization = hann\n"
      "\n[trace]\n"
      "rays_per_element = 1e4\n"
      "max_bounces = 10\n"
      "max_path_length = 0.2\n"
      "seed = 1\n"
      "\n[output]\n"
      "x_min = -0.02\n"
      "x_max = 0.02\n";
  s += "z_min = " + std::to_string(ex.z_min) + "\n";
  s += "z_max = " + std::to_string(ex.z_max) + "\n";
  // Axial pitch must resolve the round-trip carrier period of 154 um.
  s += "pixel_pitch = 5e-5\n";
  s += "image = " + ex.name + ".pgm\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_scenes <output dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);
  constexpr double kDeg = sonotrace::kPi / 180.0;

  std::vector<Example> examples;
  examples.push_back(
      {"flat_plate",
       {sonotrace::make_box("plate", {-0.04, -0.01, 0.05}, {0.04, 0.01, 0.055})},
       "bone plate, top face at 50 mm",
       0.035, 0.065});
  examples.push_back(
      {"tilted_plate",
       {sonotrace::make_tilted_box("plate", {-0.03, -0.01, 0.045},
                                   {0.03, 0.01, 0.05}, 20.0 * kDeg)},
       "bone plate tilted by 20 degrees about the elevation axis",
       0.03, 0.07});
  examples.push_back(
      {"sphere",
       {sonotrace::make_sphere("ball", {0.0, 0.0, 0.04}, 0.01, 48, 96)},
       "bone sphere, radius 10 mm, center at 40 mm depth",
       0.02, 0.06});
  examples.push_back(
      {"two_plates",
       {sonotrace::make_box("upper", {-0.04, -0.01, 0.03}, {0.04, 0.01, 0.033}),
        sonotrace::make_box("lower", {-0.04, -0.01, 0.05}, {0.04, 0.01, 0.053})},
       "stacked bone plates, top faces at 30 mm and 50 mm",
       0.02, 0.065});
  // The occluder is wider than the aperture so none of its side faces can
  // reflect toward an element.
  examples.push_back(
      {"pocket",
       {sonotrace::make_box("occluder", {-0.04, -0.01, 0.025},
                            {0.04, 0.01, 0.028}),
        sonotrace::make_box("hidden", {-0.008, -0.01, 0.045},
                            {0.008, 0.01, 0.048})},
       "narrow plate at 45 mm hidden behind a wide plate at 25 mm",
       0.015, 0.06});

  for (const Example& ex : examples) {
    for (const Mesh& m : ex.meshes) {
      sonotrace::write_wavefront(m, dir / (ex.name + "_" + m.name + ".obj"));
    }
    std::ofstream ini(dir / (ex.name + ".ini"));
    ini << config_text(ex);
    if (!ini) {
      std::cerr << "cannot write " << (dir / (ex.name + ".ini")) << "\n";
      return 1;
    }
    std::cout << "wrote " << ex.name << "\n";
  }
  return 0;
}
