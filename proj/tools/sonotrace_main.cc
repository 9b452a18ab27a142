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

// Batch front-end: sonotrace --config scene.ini --output out/

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "sonotrace/config.h"
#include "sonotrace/pipeline.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 1;

void print_summary(const sonotrace::RunResult& r) {
  const sonotrace::TraceStats& s = r.stats;
  std::printf("rays_emitted        %lld\n", static_cast<long long>(s.rays_emitted));
  std::printf("deposits            %lld\n", static_cast<long long>(s.deposits));
  std::printf("cancelled_occluded  %lld\n",
              static_cast<long long>(s.cancelled_occluded));
  std::printf("truncated           %lld\n", static_cast<long long>(s.truncated));
  std::printf("killed              %lld\n", static_cast<long long>(s.killed));
  std::printf("mean_bounces        %.4f\n", s.mean_bounces());
  std::printf("out_of_range_pixels %lld\n",
              static_cast<long long>(r.out_of_range_pixels));
  for (const auto& [stage, seconds] : r.timings) {
    std::printf("time.%-15s %.3f s\n", stage.c_str(), seconds);
  }
  std::printf("image               %s\n", r.image_path.c_str());
  if (!r.rf_path.empty()) std::printf("rf                  %s\n", r.rf_path.c_str());
  if (!r.stats_path.empty()) {
    std::printf("stats               %s\n", r.stats_path.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo ultrasound ray tracer"};
  std::string config_path;
  std::string rf_input;
  uint64_t seed = 0;
  sonotrace::RunOptions options;
  std::string output_dir = ".";
  app.add_option("--config", config_path, "simulation config (INI)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--output", output_dir, "output directory");
  auto* seed_opt =
      app.add_option("--seed", seed, "random seed, overrides the config");
  app.add_option("--threads", options.threads, "worker threads (0: all)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--dump-rf", options.dump_rf, "write channel data as URRF");
  app.add_flag("--stats-json", options.stats_json, "write stats.json");
  app.add_option("--rf-input", rf_input,
                 "beamform an existing URRF dump instead of tracing")
      ->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  options.output_dir = output_dir;
  if (*seed_opt) options.seed = seed;
  if (!rf_input.empty()) options.rf_input = rf_input;

  sonotrace::SimConfig config;
  try {
    config = sonotrace::parse_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    print_summary(sonotrace::run(config, options));
  } catch (const sonotrace::StageError& e) {
    std::cerr << "stage " << e.what() << "\n";
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return 0;
}
