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

#ifndef SONOTRACE_TRANSDUCER_H_
#define SONOTRACE_TRANSDUCER_H_

#include <cstdint>
#include <vector>

#include "sonotrace/random.h"
#include "sonotrace/vec3.h"

namespace sonotrace {

// Convex array. Elements sit on an arc of `radius` in the imaging plane
// spanned by `lateral` and `axis`; `center` is the apex of the arc, and the
// center of curvature lies at center - radius * axis. The elevation direction
// is cross(axis, lateral).
struct TransducerSpec {
  int num_elements = 128;
  double radius = 0.06;               // m
  double opening_angle = 70.0 * kPi / 180.0;  // rad, arc between end elements
  double elevational_extent = 0.004;  // m
  double center_frequency = 5e6;      // Hz
  double main_beam_angle = 2.0 * kPi / 180.0;  // rad
  double cutoff_angle = 2.0 * kPi / 180.0;     // rad
  Vec3 center{0.0, 0.0, 0.0};
  Vec3 axis{0.0, 0.0, 1.0};
  Vec3 lateral{1.0, 0.0, 0.0};

  Vec3 elevation() const { return cross(axis, lateral); }
  Vec3 curvature_center() const { return center - axis * radius; }
  // Arc angle of element `e`.
  double element_angle(int e) const;
  // Arc angles of the surface end points.
  double arc_begin() const { return -0.5 * opening_angle; }
  double arc_end() const { return 0.5 * opening_angle; }
};

// Throws std::invalid_argument on violated invariants.
void validate(const TransducerSpec& spec);

// Steering angles, radians, strictly increasing.
struct PlaneWaveScheme {
  std::vector<double> angles;
  size_t size() const { return angles.size(); }
};

void validate(const PlaneWaveScheme& scheme);

// `count` angles evenly spaced over [first, last] inclusive (radians).
PlaneWaveScheme linspace_scheme(double first, double last, int count);

struct ElementGeometry {
  int index = 0;
  Vec3 center;
  Vec3 normal;
  double lateral_arc_position = 0.0;  // m, signed arc length from the apex
};

ElementGeometry element_geometry(const TransducerSpec& spec, int e);

// Unit steering direction of a plane wave at `angle` in the imaging plane.
Vec3 steering_direction(const TransducerSpec& spec, double angle);

// Smallest projection of the aperture onto the steering direction, over the
// element centers and the arc end points. Zero delay is referenced to it.
double aperture_reference(const TransducerSpec& spec, double angle);

// Emission delay (s) for a point on the transducer surface.
double plane_wave_delay(const TransducerSpec& spec, double angle,
                        const Vec3& point, double speed_of_sound);

struct EmittedRay {
  Vec3 origin;
  Vec3 direction;
  double pressure = 0.0;
  double emission_delay = 0.0;  // s
  int event_index = 0;
};

// Uniform origin over the arc x elevation strip, uniform event, cosine
// weight (direction . normal) / rays_per_element.
class EmissionSampler {
 public:
  EmissionSampler(const TransducerSpec& spec, const PlaneWaveScheme& scheme,
                  double rays_per_element, double speed_of_sound);
  EmittedRay sample(RandomStream& rng) const;

 private:
  TransducerSpec spec_;
  std::vector<double> angles_;
  std::vector<Vec3> steering_;
  std::vector<double> reference_;
  double rays_per_element_;
  double speed_of_sound_;
};

EmittedRay sample_emission(const TransducerSpec& spec,
                           const PlaneWaveScheme& scheme,
                           double rays_per_element, double speed_of_sound,
                           RandomStream& rng);

// Ramp between the main beam and the cutoff angle. `omega_i` points from the
// element towards the source.
double receive_directivity(const TransducerSpec& spec, const Vec3& omega_i,
                           const Vec3& element_normal);

struct ReceiveTarget {
  ElementGeometry element;
  double probability = 1.0;
};

ReceiveTarget sample_receive_target(const TransducerSpec& spec,
                                    RandomStream& rng);

// Element geometry for every index, in order.
std::vector<ElementGeometry> all_elements(const TransducerSpec& spec);

}  // namespace sonotrace

#endif  // SONOTRACE_TRANSDUCER_H_
