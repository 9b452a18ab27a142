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

// End-to-end batch run: config -> scene -> trace -> image files.

#ifndef SONOTRACE_PIPELINE_H_
#define SONOTRACE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sonotrace/config.h"
#include "sonotrace/dsp.h"
#include "sonotrace/scene.h"
#include "sonotrace/tracer.h"

namespace sonotrace {

// Failure inside one pipeline stage; what() is "<stage>: <cause>".
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& cause)
      : std::runtime_error(stage + ": " + cause), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RunOptions {
  std::filesystem::path output_dir = ".";
  int threads = 0;  // <= 0: OpenMP default
  std::optional<uint64_t> seed;
  bool dump_rf = false;
  bool stats_json = false;
  // Skip scene loading and tracing; run the image stages on this URRF dump.
  std::optional<std::filesystem::path> rf_input;
};

struct RunResult {
  TraceStats stats;
  // Stage name and wall seconds, in execution order.
  std::vector<std::pair<std::string, double>> timings;
  int64_t out_of_range_pixels = 0;
  std::filesystem::path image_path;
  std::filesystem::path rf_path;          // empty unless written
  std::filesystem::path beamformed_path;  // empty unless written
  std::filesystem::path stats_path;       // empty unless written
  std::filesystem::path config_echo_path;
};

// Loads every mesh and resolves material names.
Scene build_scene(const SimConfig& config);

// Runs all stages and writes outputs into options.output_dir, which is
// created if missing. Throws StageError.
RunResult run(const SimConfig& config, const RunOptions& options);

// Stable-key JSON document with counts and timings.
std::string stats_json(const RunResult& result, const SimConfig& config);

}  // namespace sonotrace

#endif  // SONOTRACE_PIPELINE_H_
