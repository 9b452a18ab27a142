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

// Simulation configuration: an INI file with the sections
//
//   [scene]        background = <material>
//                  mesh.<name> = <obj path>, <material>
//   [materials]    <name> = <impedance MRayl>[, <roughness>]
//   [transducer]   elements, radius, opening_angle_deg, elevational_extent,
//                  center_frequency, main_beam_angle_deg, cutoff_angle_deg,
//                  center, axis, lateral
//   [acquisition]  angles_deg (list or linspace(a, b, n)), sampling_frequency,
//                  cycles, dynamic_range_db, speed_of_sound, f_number,
//                  apodization
//   [trace]        rays_per_element, max_bounces, max_path_length, seed,
//                  secondary_mode, max_secondary_interactions, num_samples
//   [output]       x_min, x_max, z_min, z_max, pixel_pitch, image, rf,
//                  beamformed
//
// Lengths in meters, frequencies in Hz, angles in degrees. See README.md.

#ifndef SONOTRACE_CONFIG_H_
#define SONOTRACE_CONFIG_H_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sonotrace/dsp.h"
#include "sonotrace/mesh.h"
#include "sonotrace/tracer.h"
#include "sonotrace/transducer.h"

namespace sonotrace {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message),
        key_(key) {}
  // Dotted key path, e.g. "trace.max_bounces".
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct MeshEntry {
  std::string name;
  std::filesystem::path path;  // absolute after parsing
  std::string material;
};

struct SimConfig {
  // [scene]
  std::vector<MeshEntry> meshes;
  std::string background = "water";
  // [materials], in file order
  std::vector<Material> materials;
  // [transducer]
  int elements = 128;
  double radius = 0.06;
  double opening_angle_deg = 70.0;
  double elevational_extent = 0.004;
  double center_frequency = 5e6;
  double main_beam_angle_deg = 2.0;
  double cutoff_angle_deg = 2.0;
  Vec3 center{0.0, 0.0, 0.0};
  Vec3 axis{0.0, 0.0, 1.0};
  Vec3 lateral{1.0, 0.0, 0.0};
  // [acquisition]
  std::vector<double> angles_deg;  // defaults to linspace(-30, 30, 25)
  double sampling_frequency = 50e6;
  double cycles = 5.0;
  double dynamic_range_db = 90.0;
  double speed_of_sound = 1540.0;
  double f_number = 0.0;
  Apodization apodization = Apodization::kNone;
  // [trace]
  int64_t rays_per_element = 100000;
  int max_bounces = 10;
  double max_path_length = 0.2;
  uint64_t seed = 1;
  SecondaryMode secondary_mode = SecondaryMode::kTransmissive;
  int max_secondary_interactions = 10;
  int num_samples = 0;  // 0: derived from max_path_length and the pulse
  // [output]
  BeamformGrid grid{-0.03, 0.03, 0.005, 0.08, 5e-5};
  std::string image = "bmode.pgm";
  std::string rf;          // optional URRF file name
  std::string beamformed;  // optional URBF file name

  TransducerSpec transducer() const;
  PlaneWaveScheme scheme() const;
  // Trace settings with num_samples resolved.
  TraceConfig trace_config() const;
  Pulse pulse() const;
};

// Parses and validates. Relative mesh paths resolve against `base_dir`.
SimConfig parse_config_text(const std::string& text,
                            const std::filesystem::path& base_dir);
SimConfig parse_config(const std::filesystem::path& path);

// Angle list syntax: "a, b, c" or "linspace(first, last, count)".
std::vector<double> parse_angle_list(const std::string& value,
                                     const std::string& key);

// Writes every resolved value; parsing the result gives an identical config.
std::string format_config(const SimConfig& config);

// Range and cross-reference checks. Throws ConfigError.
void validate(const SimConfig& config);

}  // namespace sonotrace

#endif  // SONOTRACE_CONFIG_H_
