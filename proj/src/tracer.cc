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

#include "sonotrace/tracer.h"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace sonotrace {

void validate(const TraceConfig& cfg, double center_frequency) {
  if (cfg.rays_per_element < 1 || cfg.max_bounces < 1 ||
      cfg.max_secondary_interactions < 1) {
    throw std::invalid_argument("trace counts must be >= 1");
  }
  if (!(cfg.max_path_length > 0.0)) {
    throw std::invalid_argument("max path length must be > 0");
  }
  if (!(cfg.sampling_frequency > 2.0 * center_frequency)) {
    throw std::invalid_argument(
        "sampling frequency must exceed twice the center frequency");
  }
  if (cfg.num_samples < 1) {
    throw std::invalid_argument("number of samples must be >= 1");
  }
}

ChannelData::ChannelData(int num_events, int num_elements, int num_samples,
                         double fs)
    : num_events_(num_events),
      num_elements_(num_elements),
      num_samples_(num_samples),
      fs_(fs),
      samples_(static_cast<size_t>(num_events) * num_elements * num_samples,
               0.0) {}

bool splat(ChannelData& channel, int event, int element, double time,
           double amplitude) {
  const double s = time * channel.fs();
  const double base = std::floor(s);
  const double frac = s - base;
  const int n = channel.num_samples();
  if (!(base < n)) return false;
  const auto i = static_cast<int>(base);
  bool kept = true;
  if (i >= 0) {
    channel.at(event, element, i) += amplitude * (1.0 - frac);
  } else {
    kept = false;
  }
  if (frac > 0.0) {
    if (i + 1 < n && i + 1 >= 0) {
      channel.at(event, element, i + 1) += amplitude * frac;
    } else {
      kept = false;
    }
  }
  return kept;
}

void TraceStats::merge(const TraceStats& o) {
  rays_emitted += o.rays_emitted;
  deposits += o.deposits;
  cancelled_occluded += o.cancelled_occluded;
  truncated += o.truncated;
  killed += o.killed;
  total_bounces += o.total_bounces;
  max_bounces_observed = std::max(max_bounces_observed, o.max_bounces_observed);
  max_deposit_path_length =
      std::max(max_deposit_path_length, o.max_deposit_path_length);
}

Tracer::Tracer(const Scene& scene, const Accelerator& accel,
               const TransducerSpec& spec, const PlaneWaveScheme& scheme,
               const TraceConfig& cfg)
    : scene_(scene),
      accel_(accel),
      spec_(spec),
      scheme_(scheme),
      cfg_(cfg),
      emission_(spec, scheme, static_cast<double>(cfg.rays_per_element),
                scene.speed_of_sound),
      elements_(all_elements(spec)),
      c_(scene.speed_of_sound),
      deposit_scale_(static_cast<double>(spec.num_elements) *
                     static_cast<double>(scheme.size())) {
  validate(scene);
  validate(spec);
  validate(scheme);
  validate(cfg, spec.center_frequency);
}

ChannelData Tracer::make_channel_data() const {
  return ChannelData(static_cast<int>(scheme_.size()), spec_.num_elements,
                     cfg_.num_samples, cfg_.sampling_frequency);
}

void Tracer::next_event_deposit(const PathState& state, const Hit& hit,
                                ChannelData& channel, TraceStats& stats,
                                RandomStream& rng) const {
  const ElementGeometry& element = elements_[rng.uniform_index(
      static_cast<uint32_t>(elements_.size()))];
  const Vec3 to_element = element.center - hit.position;
  const double distance = length(to_element);
  if (distance <= kRayEpsilon) return;
  const Vec3 dir = to_element / distance;

  const double directivity = receive_directivity(spec_, -dir, element.normal);
  if (directivity == 0.0) return;
  const double alpha = scene_.materials[hit.material_inside].roughness_alpha;
  const ReflectionEval lobe = evaluate_reflection(
      hit, state.direction, dir, material_pair_at(hit, scene_), alpha);
  if (lobe.value == 0.0) return;

  double transmission = 1.0;
  if (cfg_.secondary_mode == SecondaryMode::kBinary) {
    if (accel_.intersect(hit.position, dir, distance)) {
      ++stats.cancelled_occluded;
      return;
    }
  } else {
    Vec3 origin = hit.position;
    double remaining = distance;
    int crossings = 0;
    while (auto blocker = accel_.intersect(origin, dir, remaining)) {
      if (++crossings > cfg_.max_secondary_interactions) {
        ++stats.cancelled_occluded;
        return;
      }
      const auto factor = straight_through_factor(
          blocker->geometric_normal, dir, material_pair_at(*blocker, scene_));
      if (!factor) {
        ++stats.cancelled_occluded;
        return;
      }
      transmission *= *factor;
      origin = blocker->position;
      remaining -= blocker->distance_t;
    }
  }

  const double sign = lobe.a_r < 0.0 ? -1.0 : 1.0;
  const double amplitude = state.throughput * sign * lobe.value * directivity *
                           transmission * deposit_scale_;
  if (!std::isfinite(amplitude)) {
    throw PhysicsError("non-finite deposit amplitude at path length " +
                       std::to_string(state.path_length));
  }
  const double total_path = state.path_length + distance;
  const double time = state.emission_delay + total_path / c_;
  if (!splat(channel, state.event_index, element.index, time, amplitude)) {
    ++stats.truncated;
  }
  ++stats.deposits;
  stats.max_deposit_path_length =
      std::max(stats.max_deposit_path_length, total_path);
}

void Tracer::trace_ray(int64_t ray_index, ChannelData& channel,
                       TraceStats& stats) const {
  RandomStream rng(cfg_.seed, static_cast<uint64_t>(ray_index));
  const EmittedRay ray = emission_.sample(rng);
  ++stats.rays_emitted;

  PathState state;
  state.position = ray.origin;
  state.direction = ray.direction;
  state.throughput = ray.pressure;
  state.emission_delay = ray.emission_delay;
  state.event_index = ray.event_index;
  state.active = ray.pressure > 0.0;

  while (state.active) {
    const double remaining = cfg_.max_path_length - state.path_length;
    const auto hit =
        remaining > 0.0
            ? accel_.intersect(state.position, state.direction, remaining)
            : std::nullopt;
    if (!hit) {
      state.active = false;
      break;
    }
    state.path_length += hit->distance_t;
    state.position = hit->position;
    ++state.bounces;

    next_event_deposit(state, *hit, channel, stats, rng);

    if (state.bounces >= cfg_.max_bounces) {
      state.active = false;
      break;
    }
    const double alpha = scene_.materials[hit->material_inside].roughness_alpha;
    const auto event = scatter(*hit, state.direction,
                               material_pair_at(*hit, scene_), alpha, rng);
    if (!event) {
      ++stats.killed;
      state.active = false;
      break;
    }
    state.direction = event->out_direction;
    state.throughput *= event->throughput_weight;
    if (!std::isfinite(state.throughput)) {
      throw PhysicsError("non-finite path throughput");
    }
  }
  stats.total_bounces += state.bounces;
  stats.max_bounces_observed = std::max(stats.max_bounces_observed,
                                        state.bounces);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

ChannelData trace_serial(const Scene& scene, const Accelerator& accel,
                         const TransducerSpec& spec,
                         const PlaneWaveScheme& scheme, const TraceConfig& cfg,
                         TraceStats* stats) {
  const auto start = std::chrono::steady_clock::now();
  const Tracer tracer(scene, accel, spec, scheme, cfg);
  ChannelData channel = tracer.make_channel_data();
  TraceStats local;
  for (int64_t r = 0; r < tracer.total_rays(); ++r) {
    tracer.trace_ray(r, channel, local);
  }
  local.wall_seconds = seconds_since(start);
  if (stats) *stats = local;
  return channel;
}

ChannelData trace(const Scene& scene, const Accelerator& accel,
                  const TransducerSpec& spec, const PlaneWaveScheme& scheme,
                  const TraceConfig& cfg, TraceStats* stats, int threads) {
  const auto start = std::chrono::steady_clock::now();
  const Tracer tracer(scene, accel, spec, scheme, cfg);
  ChannelData channel = tracer.make_channel_data();

  const int64_t total = tracer.total_rays();
  const int64_t num_chunks = (total + kRaysPerChunk - 1) / kRaysPerChunk;
  const int num_threads = std::max(
      1, static_cast<int>(std::min<int64_t>(
             threads > 0 ? threads : omp_get_max_threads(), num_chunks)));

  // Thread 0 accumulates straight into the output; the others get private
  // buffers that are summed in thread order afterwards.
  std::vector<ChannelData> buffers(static_cast<size_t>(num_threads - 1));
  std::vector<TraceStats> thread_stats(static_cast<size_t>(num_threads));
  std::string error;

#pragma omp parallel num_threads(num_threads)
  {
    const int tid = omp_get_thread_num();
    if (tid > 0) buffers[tid - 1] = tracer.make_channel_data();
    ChannelData& out = tid == 0 ? channel : buffers[tid - 1];
    TraceStats& local = thread_stats[tid];
#pragma omp barrier
#pragma omp for schedule(static, 1)
    for (int64_t chunk = 0; chunk < num_chunks; ++chunk) {
      const int64_t end = std::min(total, (chunk + 1) * kRaysPerChunk);
      try {
        for (int64_t r = chunk * kRaysPerChunk; r < end; ++r) {
          tracer.trace_ray(r, out, local);
        }
      } catch (const std::exception& e) {
#pragma omp critical(sonotrace_trace_error)
        if (error.empty()) error = e.what();
      }
    }
  }
  if (!error.empty()) throw PhysicsError(error);

  if (!buffers.empty()) {
    std::vector<double>& dst = channel.data();
    const auto n = static_cast<int64_t>(dst.size());
#pragma omp parallel for num_threads(num_threads) schedule(static)
    for (int64_t i = 0; i < n; ++i) {
      double sum = dst[i];
      for (const ChannelData& b : buffers) sum += b.data()[i];
      dst[i] = sum;
    }
  }

  if (stats) {
    TraceStats merged;
    for (const TraceStats& s : thread_stats) merged.merge(s);
    merged.wall_seconds = seconds_since(start);
    *stats = merged;
  }
  return channel;
}

}  // namespace sonotrace
