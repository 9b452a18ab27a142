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

// Acoustic scattering at an impedance interface: Snell directions, the
// pressure reflection coefficient, stochastic reflect/transmit selection and
// a GGX microfacet model for rough boundaries.
//
// Conventions: `omega_i` is the propagation direction of the incoming ray (it
// points into the surface), `n` is the surface normal on the incoming side
// (dot(n, omega_i) < 0), and eta = Z1 / Z2 with Z1 the impedance of the
// medium the ray arrives from.

#ifndef SONOTRACE_ACOUSTICS_H_
#define SONOTRACE_ACOUSTICS_H_

#include <optional>
#include <utility>

#include "sonotrace/random.h"
#include "sonotrace/scene.h"
#include "sonotrace/vec3.h"

namespace sonotrace {

// Tolerance for unit-length checks on inputs.
inline constexpr double kUnitTolerance = 1e-6;

// Attempts to draw a microfacet normal that keeps the outgoing ray on the
// correct side of the macro surface before the path is terminated.
inline constexpr int kMaxScatterAttempts = 8;

struct SnellResult {
  Vec3 reflected;
  std::optional<Vec3> transmitted;  // empty on total internal reflection
  double cos_theta_r = 1.0;
  std::optional<double> cos_theta_t;

  bool total_internal_reflection() const { return !transmitted.has_value(); }
};

// Throws std::invalid_argument for non-unit inputs or when omega_i does not
// point into the surface.
SnellResult snell_directions(const Vec3& omega_i, const Vec3& n, double eta);

// Signed pressure reflection coefficient. An empty cos_theta_t (total
// internal reflection) gives 1.
double fresnel_amplitude(double z1, double z2, double cos_theta_r,
                         std::optional<double> cos_theta_t);

enum class Branch { kReflect, kTransmit };

// Reflect with probability a_r_squared.
Branch choose_branch(double a_r_squared, RandomStream& rng);

// GGX normal distribution D(h); zero outside the hemisphere of n.
double ggx_density(const Vec3& n, const Vec3& h, double alpha);

struct MicrofacetSample {
  Vec3 half_vector;
  double density = 0.0;  // D(h) (n . h), per steradian of h
};

// Draws h with density D(h) (n . h) via the inverse CDF
// theta = atan(alpha sqrt(u1 / (1 - u1))), phi = 2 pi u2.
MicrofacetSample sample_microfacet_normal(const Vec3& n, double alpha,
                                          RandomStream& rng);

struct InterfaceEvent {
  double eta = 1.0;
  double cos_theta_r = 1.0;
  std::optional<double> cos_theta_t;
  double a_r = 0.0;
  Branch branch = Branch::kTransmit;
  Vec3 out_direction;
  // Magnitude 1: the branch probability cancels the Fresnel intensity and the
  // microfacet density cancels the distribution term. The sign carries the
  // phase flip of a negative reflection coefficient.
  double throughput_weight = 1.0;
  double density = 0.0;  // D(h) (n . h) of the accepted microfacet normal
};

// Samples the outgoing direction at `hit`. Empty when every attempt put the
// ray on the wrong side of the geometric surface (the path is killed).
std::optional<InterfaceEvent> scatter(const Hit& hit, const Vec3& omega_i,
                                      std::pair<double, double> impedances,
                                      double alpha, RandomStream& rng);

struct ReflectionEval {
  double value = 0.0;  // directional density, 1/sr
  double a_r = 0.0;    // reflection coefficient at the half vector
};

// Reflection lobe towards `omega_target` (pointing away from the surface):
// A_r^2 D(h) (n . h) / (4 (omega_target . h)), h = normalize(-omega_i +
// omega_target).
ReflectionEval evaluate_reflection(const Hit& hit, const Vec3& omega_i,
                                   const Vec3& omega_target,
                                   std::pair<double, double> impedances,
                                   double alpha);

inline double eval_toward(const Hit& hit, const Vec3& omega_i,
                          const Vec3& omega_target,
                          std::pair<double, double> impedances, double alpha) {
  return evaluate_reflection(hit, omega_i, omega_target, impedances, alpha)
      .value;
}

// Factor applied to a ray that crosses an interface without changing
// direction: transmitted pressure amplitude (1 + A_r) times the transmit
// branch probability (1 - A_r^2). Empty on total internal reflection.
std::optional<double> straight_through_factor(const Vec3& n,
                                              const Vec3& direction,
                                              std::pair<double, double>
                                                  impedances);

}  // namespace sonotrace

#endif  // SONOTRACE_ACOUSTICS_H_
