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

#include "sonotrace/transducer.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sonotrace {

double TransducerSpec::element_angle(int e) const {
  if (num_elements == 1) return 0.0;
  return opening_angle *
         (static_cast<double>(e) / (num_elements - 1) - 0.5);
}

void validate(const TransducerSpec& spec) {
  if (spec.num_elements < 1) {
    throw std::invalid_argument("transducer needs at least one element");
  }
  if (!(spec.radius > 0.0)) {
    throw std::invalid_argument("transducer radius must be > 0");
  }
  if (!(spec.opening_angle >= 0.0) || spec.opening_angle >= 2.0 * kPi) {
    throw std::invalid_argument("opening angle must be in [0, 2 pi)");
  }
  if (!(spec.elevational_extent > 0.0)) {
    throw std::invalid_argument("elevational extent must be > 0");
  }
  if (!(spec.center_frequency > 0.0)) {
    throw std::invalid_argument("center frequency must be > 0");
  }
  if (!(spec.main_beam_angle >= 0.0) ||
      spec.main_beam_angle > spec.cutoff_angle ||
      spec.cutoff_angle > 0.5 * kPi) {
    throw std::invalid_argument(
        "directivity angles must satisfy 0 <= main beam <= cutoff <= 90 deg");
  }
  if (!is_unit(spec.axis) || !is_unit(spec.lateral) ||
      std::abs(dot(spec.axis, spec.lateral)) > 1e-6) {
    throw std::invalid_argument(
        "transducer axis and lateral must be orthonormal");
  }
}

void validate(const PlaneWaveScheme& scheme) {
  if (scheme.angles.empty()) {
    throw std::invalid_argument("plane-wave scheme has no angles");
  }
  for (size_t i = 0; i < scheme.angles.size(); ++i) {
    if (!(std::abs(scheme.angles[i]) < 0.5 * kPi)) {
      throw std::invalid_argument("steering angle outside (-90, 90) deg");
    }
    if (i > 0 && !(scheme.angles[i] > scheme.angles[i - 1])) {
      throw std::invalid_argument("steering angles must strictly increase");
    }
  }
}

PlaneWaveScheme linspace_scheme(double first, double last, int count) {
  if (count < 1) throw std::invalid_argument("linspace needs count >= 1");
  PlaneWaveScheme scheme;
  if (count == 1) {
    scheme.angles = {first};
    return scheme;
  }
  for (int i = 0; i < count; ++i) {
    scheme.angles.push_back(first + (last - first) * i / (count - 1));
  }
  scheme.angles.back() = last;
  return scheme;
}

ElementGeometry element_geometry(const TransducerSpec& spec, int e) {
  if (e < 0 || e >= spec.num_elements) {
    throw std::out_of_range("element index " + std::to_string(e) +
                            " out of range");
  }
  const double phi = spec.element_angle(e);
  ElementGeometry g;
  g.index = e;
  g.normal = spec.lateral * std::sin(phi) + spec.axis * std::cos(phi);
  g.center = spec.curvature_center() + g.normal * spec.radius;
  g.lateral_arc_position = spec.radius * phi;
  return g;
}

std::vector<ElementGeometry> all_elements(const TransducerSpec& spec) {
  std::vector<ElementGeometry> out;
  out.reserve(static_cast<size_t>(spec.num_elements));
  for (int e = 0; e < spec.num_elements; ++e) {
    out.push_back(element_geometry(spec, e));
  }
  return out;
}

Vec3 steering_direction(const TransducerSpec& spec, double angle) {
  return spec.axis * std::cos(angle) + spec.lateral * std::sin(angle);
}

double aperture_reference(const TransducerSpec& spec, double angle) {
  const Vec3 k = steering_direction(spec, angle);
  const Vec3 cc = spec.curvature_center();
  auto project = [&](double phi) {
    return dot(cc + (spec.lateral * std::sin(phi) + spec.axis * std::cos(phi)) *
                        spec.radius,
               k);
  };
  double ref = std::min(project(spec.arc_begin()), project(spec.arc_end()));
  for (int e = 0; e < spec.num_elements; ++e) {
    ref = std::min(ref, project(spec.element_angle(e)));
  }
  return ref;
}

double plane_wave_delay(const TransducerSpec& spec, double angle,
                        const Vec3& point, double speed_of_sound) {
  const Vec3 k = steering_direction(spec, angle);
  return (dot(point, k) - aperture_reference(spec, angle)) / speed_of_sound;
}

EmissionSampler::EmissionSampler(const TransducerSpec& spec,
                                 const PlaneWaveScheme& scheme,
                                 double rays_per_element,
                                 double speed_of_sound)
    : spec_(spec),
      angles_(scheme.angles),
      rays_per_element_(rays_per_element),
      speed_of_sound_(speed_of_sound) {
  for (double angle : angles_) {
    steering_.push_back(steering_direction(spec, angle));
    reference_.push_back(aperture_reference(spec, angle));
  }
}

EmittedRay EmissionSampler::sample(RandomStream& rng) const {
  const double phi = spec_.arc_begin() + rng.uniform() * spec_.opening_angle;
  const double elev = (rng.uniform() - 0.5) * spec_.elevational_extent;
  const auto event = static_cast<int>(
      rng.uniform_index(static_cast<uint32_t>(angles_.size())));

  const Vec3 normal =
      spec_.lateral * std::sin(phi) + spec_.axis * std::cos(phi);
  EmittedRay ray;
  ray.origin = spec_.curvature_center() + normal * spec_.radius +
               spec_.elevation() * elev;
  ray.direction = steering_[event];
  ray.event_index = event;
  ray.pressure = std::max(0.0, dot(ray.direction, normal)) / rays_per_element_;
  // Surface points never project below the reference; the clamp only absorbs
  // rounding.
  ray.emission_delay = std::max(
      0.0, (dot(ray.origin, ray.direction) - reference_[event]) /
               speed_of_sound_);
  return ray;
}

EmittedRay sample_emission(const TransducerSpec& spec,
                           const PlaneWaveScheme& scheme,
                           double rays_per_element, double speed_of_sound,
                           RandomStream& rng) {
  return EmissionSampler(spec, scheme, rays_per_element, speed_of_sound)
      .sample(rng);
}

double receive_directivity(const TransducerSpec& spec, const Vec3& omega_i,
                           const Vec3& element_normal) {
  const double alpha =
      std::acos(std::clamp(dot(element_normal, omega_i), -1.0, 1.0));
  if (alpha <= spec.main_beam_angle) return 1.0;
  if (alpha > spec.cutoff_angle) return 0.0;
  // main < alpha <= cutoff implies cutoff > main, so the ramp is well defined.
  return (spec.cutoff_angle - alpha) /
         (spec.cutoff_angle - spec.main_beam_angle);
}

ReceiveTarget sample_receive_target(const TransducerSpec& spec,
                                    RandomStream& rng) {
  const auto e = static_cast<int>(
      rng.uniform_index(static_cast<uint32_t>(spec.num_elements)));
  return {element_geometry(spec, e), 1.0 / spec.num_elements};
}

}  // namespace sonotrace
