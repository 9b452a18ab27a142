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

#include "sonotrace/pipeline.h"

#include <chrono>
#include <fstream>

#include "json.hpp"
#include "sonotrace/mesh.h"
#include "sonotrace/rf_io.h"

namespace sonotrace {

namespace {

class StageRunner {
 public:
  explicit StageRunner(RunResult& result) : result_(result) {}

  template <typename F>
  auto operator()(const std::string& stage, F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(stage, start);
      } else {
        auto value = fn();
        record(stage, start);
        return value;
      }
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
  }

 private:
  void record(const std::string& stage,
              std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - start;
    result_.timings.emplace_back(stage, dt.count());
  }

  RunResult& result_;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

Scene build_scene(const SimConfig& config) {
  Scene scene;
  scene.materials = config.materials;
  scene.speed_of_sound = config.speed_of_sound;
  scene.background = scene.find_material(config.background);
  if (scene.background < 0) {
    throw ConfigError("scene.background", "unknown material " + config.background);
  }
  for (const MeshEntry& entry : config.meshes) {
    Mesh mesh = load_mesh(entry.path);
    mesh.name = entry.name;
    mesh.material_id = scene.find_material(entry.material);
    if (mesh.material_id < 0) {
      throw ConfigError("scene.mesh." + entry.name,
                        "unknown material " + entry.material);
    }
    scene.meshes.push_back(std::move(mesh));
  }
  validate(scene);
  return scene;
}

RunResult run(const SimConfig& input, const RunOptions& options) {
  RunResult result;
  StageRunner stage(result);

  SimConfig config = input;
  if (options.seed) config.seed = *options.seed;

  stage("setup", [&] {
    validate(config);
    std::filesystem::create_directories(options.output_dir);
    result.config_echo_path = options.output_dir / "resolved.ini";
    write_text(result.config_echo_path, format_config(config));
  });

  const TransducerSpec spec = config.transducer();
  const PlaneWaveScheme scheme = config.scheme();
  const TraceConfig trace_cfg = config.trace_config();
  const Pulse pulse = config.pulse();

  ChannelData rf;
  if (options.rf_input) {
    rf = stage("load_rf", [&] {
      ChannelData loaded = read_urrf(*options.rf_input);
      if (loaded.num_events() != static_cast<int>(scheme.size()) ||
          loaded.num_elements() != spec.num_elements) {
        throw FormatError("dump dimensions do not match the configuration");
      }
      if (loaded.fs() != config.sampling_frequency) {
        throw FormatError("dump sampling frequency does not match");
      }
      return loaded;
    });
  } else {
    const Scene scene = stage("load", [&] { return build_scene(config); });
    const Accelerator accel =
        stage("build", [&] { return build_accelerator(scene); });
    rf = stage("trace", [&] {
      validate(trace_cfg, spec.center_frequency);
      return trace(scene, accel, spec, scheme, trace_cfg, &result.stats,
                   options.threads);
    });
    if (options.dump_rf || !config.rf.empty()) {
      stage("dump_rf", [&] {
        result.rf_path =
            options.output_dir / (config.rf.empty() ? "channels.urrf" : config.rf);
        write_urrf(rf, result.rf_path);
      });
    }
  }

  const ChannelData rf_conv = stage("convolve", [&] {
    return convolve_channels(rf, pulse, options.threads);
  });
  BeamformOptions bf_options;
  bf_options.f_number = config.f_number;
  bf_options.apodization = config.apodization;
  BeamformResult bf = stage("beamform", [&] {
    return das_beamform(rf_conv, spec, scheme, config.grid,
                        config.speed_of_sound, bf_options, options.threads);
  });
  result.out_of_range_pixels = bf.out_of_range_pixels;
  if (!config.beamformed.empty()) {
    stage("dump_beamformed", [&] {
      result.beamformed_path = options.output_dir / config.beamformed;
      write_urbf(bf.image, config.grid.pixel_pitch, result.beamformed_path);
    });
  }
  const Image2D env =
      stage("envelope", [&] { return envelope(bf.image, options.threads); });
  const BModeImage bmode = stage("log_compress", [&] {
    return log_compress(env, config.dynamic_range_db, config.grid);
  });
  stage("export", [&] {
    result.image_path = options.output_dir / config.image;
    export_image(bmode, result.image_path);
  });

  if (options.stats_json) {
    result.stats_path = options.output_dir / "stats.json";
    stage("stats", [&] {
      write_text(result.stats_path, stats_json(result, config) + "\n");
    });
  }
  return result;
}

std::string stats_json(const RunResult& result, const SimConfig& config) {
  const TraceStats& s = result.stats;
  nlohmann::ordered_json doc;
  doc["seed"] = config.seed;
  doc["rays_emitted"] = s.rays_emitted;
  doc["deposits"] = s.deposits;
  doc["cancelled_occluded"] = s.cancelled_occluded;
  doc["truncated"] = s.truncated;
  doc["killed"] = s.killed;
  doc["mean_bounces"] = s.mean_bounces();
  doc["max_bounces_observed"] = s.max_bounces_observed;
  doc["max_deposit_path_length_m"] = s.max_deposit_path_length;
  doc["out_of_range_pixels"] = result.out_of_range_pixels;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  double total = 0.0;
  for (const auto& [name, seconds] : result.timings) {
    timings[name] = seconds;
    total += seconds;
  }
  timings["total"] = total;
  doc["timings_s"] = timings;
  return doc.dump(2);
}

}  // namespace sonotrace
