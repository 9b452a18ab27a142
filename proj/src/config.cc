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

#include "sonotrace/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace sonotrace {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& value, const std::string& key) {
  const std::string v = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() ||
      !std::isfinite(out)) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
  return out;
}

// Integers may be written in scientific notation (1e5) but must be integral.
int64_t to_integer(const std::string& value, const std::string& key) {
  const double d = to_double(value, key);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
  return static_cast<int64_t>(d);
}

Vec3 to_vec3(const std::string& value, const std::string& key) {
  const auto parts = split(value, ',');
  if (parts.size() != 3) {
    throw ConfigError(key, "expected three comma-separated numbers");
  }
  return {to_double(parts[0], key), to_double(parts[1], key),
          to_double(parts[2], key)};
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string fmt(const Vec3& v) {
  return fmt(v.x) + ", " + fmt(v.y) + ", " + fmt(v.z);
}

void require_positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
}

using Handler = std::function<void(const std::string&, const std::string&)>;

void dispatch_section(const pt::ptree& section, const std::string& name,
                      const std::map<std::string, Handler>& handlers) {
  for (const auto& [key, node] : section) {
    const std::string path = name + "." + key;
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError(path, "unknown key");
    it->second(node.data(), path);
  }
}

}  // namespace

std::vector<double> parse_angle_list(const std::string& value,
                                     const std::string& key) {
  const std::string v = trim(value);
  if (v.rfind("linspace", 0) == 0) {
    const auto open = v.find('(');
    const auto close = v.rfind(')');
    if (open == std::string::npos || close == std::string::npos ||
        close < open || trim(v.substr(close + 1)) != "") {
      throw ConfigError(key, "malformed linspace(first, last, count)");
    }
    const auto args = split(v.substr(open + 1, close - open - 1), ',');
    if (args.size() != 3) {
      throw ConfigError(key, "linspace takes (first, last, count)");
    }
    const double first = to_double(args[0], key);
    const double last = to_double(args[1], key);
    const int64_t count = to_integer(args[2], key);
    if (count < 1) throw ConfigError(key, "linspace count must be >= 1");
    if (count > 1 && !(last > first)) {
      throw ConfigError(key, "linspace needs last > first");
    }
    std::vector<double> out;
    for (int64_t i = 0; i < count; ++i) {
      out.push_back(count == 1 ? first
                               : first + (last - first) *
                                             static_cast<double>(i) /
                                             static_cast<double>(count - 1));
    }
    out.back() = count == 1 ? first : last;
    return out;
  }
  std::vector<double> out;
  for (const std::string& item : split(v, ',')) {
    out.push_back(to_double(item, key));
  }
  if (out.empty()) throw ConfigError(key, "empty angle list");
  return out;
}

TransducerSpec SimConfig::transducer() const {
  constexpr double kDeg = kPi / 180.0;
  TransducerSpec spec;
  spec.num_elements = elements;
  spec.radius = radius;
  spec.opening_angle = opening_angle_deg * kDeg;
  spec.elevational_extent = elevational_extent;
  spec.center_frequency = center_frequency;
  spec.main_beam_angle = main_beam_angle_deg * kDeg;
  spec.cutoff_angle = cutoff_angle_deg * kDeg;
  spec.center = center;
  spec.axis = axis;
  spec.lateral = lateral;
  return spec;
}

PlaneWaveScheme SimConfig::scheme() const {
  PlaneWaveScheme scheme;
  for (double a : angles_deg) scheme.angles.push_back(a * kPi / 180.0);
  return scheme;
}

Pulse SimConfig::pulse() const {
  return pulse_kernel(center_frequency, cycles, sampling_frequency);
}

TraceConfig SimConfig::trace_config() const {
  TraceConfig cfg;
  cfg.rays_per_element = rays_per_element;
  cfg.max_bounces = max_bounces;
  cfg.max_path_length = max_path_length;
  cfg.seed = seed;
  cfg.sampling_frequency = sampling_frequency;
  cfg.secondary_mode = secondary_mode;
  cfg.max_secondary_interactions = max_secondary_interactions;
  cfg.num_samples =
      num_samples > 0
          ? num_samples
          : default_num_samples(max_path_length, speed_of_sound,
                                sampling_frequency, pulse());
  return cfg;
}

void validate(const SimConfig& c) {
  if (c.materials.empty()) {
    throw ConfigError("materials", "missing required section (at least one material)");
  }
  std::set<std::string> names;
  for (const Material& m : c.materials) {
    const std::string key = "materials." + m.name;
    if (!names.insert(m.name).second) throw ConfigError(key, "duplicate");
    if (!(m.impedance_z > 0.0)) throw ConfigError(key, "impedance must be > 0");
    if (!(m.roughness_alpha > 0.0) || m.roughness_alpha > 1.0) {
      throw ConfigError(key, "roughness must be in (0, 1]");
    }
  }
  if (!names.contains(c.background)) {
    throw ConfigError("scene.background",
                      "material '" + c.background + "' is not defined");
  }
  for (const MeshEntry& m : c.meshes) {
    if (!names.contains(m.material)) {
      throw ConfigError("scene.mesh." + m.name,
                        "material '" + m.material + "' is not defined");
    }
  }
  if (c.elements < 1) throw ConfigError("transducer.elements", "must be >= 1");
  require_positive(c.radius, "transducer.radius");
  if (!(c.opening_angle_deg >= 0.0) || !(c.opening_angle_deg < 360.0)) {
    throw ConfigError("transducer.opening_angle_deg", "must be in [0, 360)");
  }
  require_positive(c.elevational_extent, "transducer.elevational_extent");
  require_positive(c.center_frequency, "transducer.center_frequency");
  if (!(c.main_beam_angle_deg >= 0.0)) {
    throw ConfigError("transducer.main_beam_angle_deg", "must be >= 0");
  }
  if (!(c.cutoff_angle_deg >= c.main_beam_angle_deg) ||
      !(c.cutoff_angle_deg <= 90.0)) {
    throw ConfigError("transducer.cutoff_angle_deg",
                      "must lie in [main_beam_angle_deg, 90]");
  }
  if (!is_unit(c.axis)) throw ConfigError("transducer.axis", "must be unit length");
  if (!is_unit(c.lateral) || std::abs(dot(c.axis, c.lateral)) > 1e-6) {
    throw ConfigError("transducer.lateral",
                      "must be unit length and orthogonal to the axis");
  }
  if (c.angles_deg.empty()) {
    throw ConfigError("acquisition.angles_deg", "no angles");
  }
  for (size_t i = 0; i < c.angles_deg.size(); ++i) {
    if (!(std::abs(c.angles_deg[i]) < 90.0)) {
      throw ConfigError("acquisition.angles_deg", "angles must lie in (-90, 90)");
    }
    if (i > 0 && !(c.angles_deg[i] > c.angles_deg[i - 1])) {
      throw ConfigError("acquisition.angles_deg", "angles must strictly increase");
    }
  }
  if (!(c.sampling_frequency > 2.0 * c.center_frequency)) {
    throw ConfigError("acquisition.sampling_frequency",
                      "must exceed twice the center frequency");
  }
  if (!(c.cycles >= 1.0)) throw ConfigError("acquisition.cycles", "must be >= 1");
  require_positive(c.dynamic_range_db, "acquisition.dynamic_range_db");
  require_positive(c.speed_of_sound, "acquisition.speed_of_sound");
  if (!(c.f_number >= 0.0)) throw ConfigError("acquisition.f_number", "must be >= 0");
  if (c.rays_per_element < 1) {
    throw ConfigError("trace.rays_per_element", "must be >= 1");
  }
  if (c.max_bounces < 1) throw ConfigError("trace.max_bounces", "must be >= 1");
  require_positive(c.max_path_length, "trace.max_path_length");
  if (c.max_secondary_interactions < 1) {
    throw ConfigError("trace.max_secondary_interactions", "must be >= 1");
  }
  if (c.num_samples < 0) throw ConfigError("trace.num_samples", "must be >= 0");
  require_positive(c.grid.pixel_pitch, "output.pixel_pitch");
  if (!(c.grid.x_max > c.grid.x_min)) {
    throw ConfigError("output.x_max", "must exceed output.x_min");
  }
  if (!(c.grid.z_max > c.grid.z_min)) {
    throw ConfigError("output.z_max", "must exceed output.z_min");
  }
  if (c.image.empty()) throw ConfigError("output.image", "must not be empty");
}

namespace {

// Drops `; ...` and `# ...` tails that follow whitespace; the INI reader only
// knows whole-line comments.
std::string strip_inline_comments(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    for (size_t i = 1; i < line.size(); ++i) {
      if ((line[i] == ';' || line[i] == '#') &&
          std::isspace(static_cast<unsigned char>(line[i - 1]))) {
        line.resize(i);
        break;
      }
    }
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace

SimConfig parse_config_text(const std::string& text,
                            const std::filesystem::path& base_dir) {
  pt::ptree tree;
  {
    std::istringstream in(strip_inline_comments(text));
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError("", "line " + std::to_string(e.line()) + ": " +
                                e.message());
    }
  }

  SimConfig c;
  c.angles_deg = parse_angle_list("linspace(-30, 30, 25)", "");
  bool secondary_set = false;

  auto as_double = [](double& dst) {
    return [&dst](const std::string& v, const std::string& k) {
      dst = to_double(v, k);
    };
  };
  auto as_int = [](int& dst) {
    return [&dst](const std::string& v, const std::string& k) {
      const int64_t i = to_integer(v, k);
      if (i < std::numeric_limits<int>::min() ||
          i > std::numeric_limits<int>::max()) {
        throw ConfigError(k, "out of range");
      }
      dst = static_cast<int>(i);
    };
  };
  auto as_string = [](std::string& dst) {
    return [&dst](const std::string& v, const std::string&) { dst = trim(v); };
  };
  auto as_vec3 = [](Vec3& dst) {
    return [&dst](const std::string& v, const std::string& k) {
      dst = to_vec3(v, k);
    };
  };

  for (const auto& [section_name, section] : tree) {
    if (section.empty() && !section.data().empty()) {
      throw ConfigError(section_name, "key outside of any section");
    }
    if (section_name == "scene") {
      for (const auto& [key, node] : section) {
        const std::string path = "scene." + key;
        const std::string value = trim(node.data());
        if (key == "background") {
          c.background = value;
        } else if (key.rfind("mesh.", 0) == 0 && key.size() > 5) {
          const auto parts = split(value, ',');
          if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
            throw ConfigError(path, "expected '<file>, <material>'");
          }
          std::filesystem::path file(parts[0]);
          if (file.is_relative()) file = base_dir / file;
          c.meshes.push_back({key.substr(5),
                              std::filesystem::absolute(file).lexically_normal(),
                              parts[1]});
        } else {
          throw ConfigError(path, "unknown key");
        }
      }
    } else if (section_name == "materials") {
      for (const auto& [key, node] : section) {
        const std::string path = "materials." + key;
        const auto parts = split(node.data(), ',');
        if (parts.empty() || parts.size() > 2) {
          throw ConfigError(path, "expected '<impedance>[, <roughness>]'");
        }
        Material m;
        m.name = key;
        m.impedance_z = to_double(parts[0], path);
        if (parts.size() == 2) m.roughness_alpha = to_double(parts[1], path);
        c.materials.push_back(m);
      }
    } else if (section_name == "transducer") {
      dispatch_section(
          section, section_name,
          {{"elements", as_int(c.elements)},
           {"radius", as_double(c.radius)},
           {"opening_angle_deg", as_double(c.opening_angle_deg)},
           {"elevational_extent", as_double(c.elevational_extent)},
           {"center_frequency", as_double(c.center_frequency)},
           {"main_beam_angle_deg", as_double(c.main_beam_angle_deg)},
           {"cutoff_angle_deg", as_double(c.cutoff_angle_deg)},
           {"center", as_vec3(c.center)},
           {"axis", as_vec3(c.axis)},
           {"lateral", as_vec3(c.lateral)}});
    } else if (section_name == "acquisition") {
      dispatch_section(
          section, section_name,
          {{"angles_deg",
            [&](const std::string& v, const std::string& k) {
              c.angles_deg = parse_angle_list(v, k);
            }},
           {"sampling_frequency", as_double(c.sampling_frequency)},
           {"cycles", as_double(c.cycles)},
           {"dynamic_range_db", as_double(c.dynamic_range_db)},
           {"speed_of_sound", as_double(c.speed_of_sound)},
           {"f_number", as_double(c.f_number)},
           {"apodization",
            [&](const std::string& v, const std::string& k) {
              const std::string s = trim(v);
              if (s == "none") {
                c.apodization = Apodization::kNone;
              } else if (s == "hann") {
                c.apodization = Apodization::kHann;
              } else {
                throw ConfigError(k, "expected 'none' or 'hann'");
              }
            }}});
    } else if (section_name == "trace") {
      dispatch_section(
          section, section_name,
          {{"rays_per_element",
            [&](const std::string& v, const std::string& k) {
              c.rays_per_element = to_integer(v, k);
            }},
           {"max_bounces", as_int(c.max_bounces)},
           {"max_path_length", as_double(c.max_path_length)},
           {"seed",
            [&](const std::string& v, const std::string& k) {
              const int64_t s = to_integer(v, k);
              if (s < 0) throw ConfigError(k, "must be >= 0");
              c.seed = static_cast<uint64_t>(s);
            }},
           {"secondary_mode",
            [&](const std::string& v, const std::string& k) {
              const std::string s = trim(v);
              if (s == "binary") {
                c.secondary_mode = SecondaryMode::kBinary;
              } else if (s == "transmissive") {
                c.secondary_mode = SecondaryMode::kTransmissive;
              } else {
                throw ConfigError(k, "expected 'binary' or 'transmissive'");
              }
            }},
           {"max_secondary_interactions",
            [&](const std::string& v, const std::string& k) {
              as_int(c.max_secondary_interactions)(v, k);
              secondary_set = true;
            }},
           {"num_samples", as_int(c.num_samples)}});
    } else if (section_name == "output") {
      dispatch_section(section, section_name,
                       {{"x_min", as_double(c.grid.x_min)},
                        {"x_max", as_double(c.grid.x_max)},
                        {"z_min", as_double(c.grid.z_min)},
                        {"z_max", as_double(c.grid.z_max)},
                        {"pixel_pitch", as_double(c.grid.pixel_pitch)},
                        {"image", as_string(c.image)},
                        {"rf", as_string(c.rf)},
                        {"beamformed", as_string(c.beamformed)}});
    } else {
      throw ConfigError(section_name, "unknown section");
    }
  }
  if (!secondary_set) c.max_secondary_interactions = c.max_bounces;
  validate(c);
  return c;
}

SimConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::filesystem::absolute(path).parent_path());
}

std::string format_config(const SimConfig& c) {
  std::ostringstream out;
  out << "[scene]\n";
  out << "background = " << c.background << "\n";
  for (const MeshEntry& m : c.meshes) {
    out << "mesh." << m.name << " = " << m.path.string() << ", " << m.material
        << "\n";
  }
  out << "\n[materials]\n";
  for (const Material& m : c.materials) {
    out << m.name << " = " << fmt(m.impedance_z) << ", "
        << fmt(m.roughness_alpha) << "\n";
  }
  out << "\n[transducer]\n"
      << "elements = " << c.elements << "\n"
      << "radius = " << fmt(c.radius) << "\n"
      << "opening_angle_deg = " << fmt(c.opening_angle_deg) << "\n"
      << "elevational_extent = " << fmt(c.elevational_extent) << "\n"
      << "center_frequency = " << fmt(c.center_frequency) << "\n"
      << "main_beam_angle_deg = " << fmt(c.main_beam_angle_deg) << "\n"
      << "cutoff_angle_deg = " << fmt(c.cutoff_angle_deg) << "\n"
      << "center = " << fmt(c.center) << "\n"
      << "axis = " << fmt(c.axis) << "\n"
      << "lateral = " << fmt(c.lateral) << "\n";
  out << "\n[acquisition]\nangles_deg = ";
  for (size_t i = 0; i < c.angles_deg.size(); ++i) {
    out << (i ? ", " : "") << fmt(c.angles_deg[i]);
  }
  out << "\n"
      << "sampling_frequency = " << fmt(c.sampling_frequency) << "\n"
      << "cycles = " << fmt(c.cycles) << "\n"
      << "dynamic_range_db = " << fmt(c.dynamic_range_db) << "\n"
      << "speed_of_sound = " << fmt(c.speed_of_sound) << "\n"
      << "f_number = " << fmt(c.f_number) << "\n"
      << "apodization = "
      << (c.apodization == Apodization::kHann ? "hann" : "none") << "\n";
  out << "\n[trace]\n"
      << "rays_per_element = " << c.rays_per_element << "\n"
      << "max_bounces = " << c.max_bounces << "\n"
      << "max_path_length = " << fmt(c.max_path_length) << "\n"
      << "seed = " << c.seed << "\n"
      << "secondary_mode = "
      << (c.secondary_mode == SecondaryMode::kBinary ? "binary"
                                                     : "transmissive")
      << "\n"
      << "max_secondary_interactions = " << c.max_secondary_interactions
      << "\n"
      << "num_samples = " << c.num_samples << "\n";
  out << "\n[output]\n"
      << "x_min = " << fmt(c.grid.x_min) << "\n"
      << "x_max = " << fmt(c.grid.x_max) << "\n"
      << "z_min = " << fmt(c.grid.z_min) << "\n"
      << "z_max = " << fmt(c.grid.z_max) << "\n"
      << "pixel_pitch = " << fmt(c.grid.pixel_pitch) << "\n"
      << "image = " << c.image << "\n";
  if (!c.rf.empty()) out << "rf = " << c.rf << "\n";
  if (!c.beamformed.empty()) out << "beamformed = " << c.beamformed << "\n";
  return out.str();
}

}  // namespace sonotrace
