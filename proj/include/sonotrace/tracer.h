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

#ifndef SONOTRACE_TRACER_H_
#define SONOTRACE_TRACER_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sonotrace/acoustics.h"
#include "sonotrace/random.h"
#include "sonotrace/scene.h"
#include "sonotrace/transducer.h"

namespace sonotrace {

enum class SecondaryMode {
  // Any geometry between the interaction point and the element cancels the
  // deposit.
  kBinary,
  // The secondary ray continues straight through interfaces, picking up the
  // transmission factor of each; total internal reflection cancels it.
  kTransmissive,
};

struct TraceConfig {
  int64_t rays_per_element = 100000;
  int max_bounces = 10;
  double max_path_length = 0.2;  // m
  uint64_t seed = 1;
  double sampling_frequency = 50e6;  // Hz
  int num_samples = 0;               // 0: not yet resolved
  SecondaryMode secondary_mode = SecondaryMode::kTransmissive;
  int max_secondary_interactions = 10;
};

// Checks counts and the carrier Nyquist limit. Throws std::invalid_argument.
void validate(const TraceConfig& cfg, double center_frequency);

// Per-event, per-element pressure traces sampled at `fs`.
class ChannelData {
 public:
  ChannelData() = default;
  ChannelData(int num_events, int num_elements, int num_samples, double fs);

  int num_events() const { return num_events_; }
  int num_elements() const { return num_elements_; }
  int num_samples() const { return num_samples_; }
  double fs() const { return fs_; }

  double& at(int event, int element, int sample) {
    return samples_[index(event, element, sample)];
  }
  double at(int event, int element, int sample) const {
    return samples_[index(event, element, sample)];
  }
  std::span<double> trace(int event, int element) {
    return {samples_.data() + index(event, element, 0),
            static_cast<size_t>(num_samples_)};
  }
  std::span<const double> trace(int event, int element) const {
    return {samples_.data() + index(event, element, 0),
            static_cast<size_t>(num_samples_)};
  }
  std::vector<double>& data() { return samples_; }
  const std::vector<double>& data() const { return samples_; }

  bool same_shape(const ChannelData& other) const {
    return num_events_ == other.num_events_ &&
           num_elements_ == other.num_elements_ &&
           num_samples_ == other.num_samples_;
  }

 private:
  size_t index(int event, int element, int sample) const {
    return (static_cast<size_t>(event) * num_elements_ + element) *
               num_samples_ +
           sample;
  }

  int num_events_ = 0;
  int num_elements_ = 0;
  int num_samples_ = 0;
  double fs_ = 0.0;
  std::vector<double> samples_;
};

// Linear splat of `amplitude` at `time` (s). Returns false when part of the
// contribution fell outside the buffer and was dropped.
bool splat(ChannelData& channel, int event, int element, double time,
           double amplitude);

struct TraceStats {
  int64_t rays_emitted = 0;
  int64_t deposits = 0;
  int64_t cancelled_occluded = 0;
  int64_t truncated = 0;
  int64_t killed = 0;  // terminated by exhausted scatter resampling
  int64_t total_bounces = 0;
  int max_bounces_observed = 0;
  double max_deposit_path_length = 0.0;  // m, primary + secondary segment
  double wall_seconds = 0.0;

  double mean_bounces() const {
    return rays_emitted == 0 ? 0.0
                             : static_cast<double>(total_bounces) /
                                   static_cast<double>(rays_emitted);
  }
  void merge(const TraceStats& other);
};

struct PathState {
  Vec3 position;
  Vec3 direction;
  double throughput = 0.0;  // signed
  double path_length = 0.0;
  int bounces = 0;
  double emission_delay = 0.0;
  int event_index = 0;
  bool active = true;
};

class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Monte Carlo round-trip tracer. Holds read-only references to the scene,
// accelerator and transducer; one instance is shared by all workers.
class Tracer {
 public:
  Tracer(const Scene& scene, const Accelerator& accel,
         const TransducerSpec& spec, const PlaneWaveScheme& scheme,
         const TraceConfig& cfg);

  // Output buffer shaped for this configuration, all zero.
  ChannelData make_channel_data() const;

  int64_t total_rays() const {
    return cfg_.rays_per_element * spec_.num_elements;
  }

  // Traces primary ray `ray_index` (its random stream is derived from the
  // configured seed and the index) and accumulates into `channel`.
  void trace_ray(int64_t ray_index, ChannelData& channel,
                 TraceStats& stats) const;

  // Casts a secondary ray from `hit` towards a randomly chosen element and
  // deposits the estimate into `channel`.
  void next_event_deposit(const PathState& state, const Hit& hit,
                          ChannelData& channel, TraceStats& stats,
                          RandomStream& rng) const;

 private:
  const Scene& scene_;
  const Accelerator& accel_;
  TransducerSpec spec_;
  PlaneWaveScheme scheme_;
  TraceConfig cfg_;
  EmissionSampler emission_;
  std::vector<ElementGeometry> elements_;
  double c_;
  // Each deposit is scaled by 1 / (selection probability) and by the number
  // of events (rays draw their event uniformly).
  double deposit_scale_;
};

// Rays per work chunk; chunks are the unit of parallel scheduling.
inline constexpr int64_t kRaysPerChunk = 2048;

// OpenMP-parallel trace. `threads` <= 0 uses the OpenMP default. Results for
// a fixed thread count are reproducible; different thread counts agree up to
// floating-point summation order.
ChannelData trace(const Scene& scene, const Accelerator& accel,
                  const TransducerSpec& spec, const PlaneWaveScheme& scheme,
                  const TraceConfig& cfg, TraceStats* stats = nullptr,
                  int threads = 0);

// Single-threaded reference: rays in index order into one buffer.
ChannelData trace_serial(const Scene& scene, const Accelerator& accel,
                         const TransducerSpec& spec,
                         const PlaneWaveScheme& scheme, const TraceConfig& cfg,
                         TraceStats* stats = nullptr);

}  // namespace sonotrace

#endif  // SONOTRACE_TRACER_H_
