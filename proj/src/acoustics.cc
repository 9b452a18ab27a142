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

#include "sonotrace/acoustics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sonotrace {

namespace {

// Cosine of the transmission angle; empty past the critical angle.
std::optional<double> transmitted_cosine(double cos_theta_r, double eta) {
  if (eta == 1.0) return cos_theta_r;
  const double k = 1.0 - eta * eta * (1.0 - cos_theta_r * cos_theta_r);
  if (k < 0.0) return std::nullopt;
  return std::sqrt(k);
}

}  // namespace

SnellResult snell_directions(const Vec3& omega_i, const Vec3& n, double eta) {
  if (!is_unit(omega_i, kUnitTolerance) || !is_unit(n, kUnitTolerance)) {
    throw std::invalid_argument("snell_directions: inputs must be unit length");
  }
  if (!(eta > 0.0)) {
    throw std::invalid_argument("snell_directions: eta must be > 0");
  }
  SnellResult out;
  out.cos_theta_r = dot(n, -omega_i);
  if (!(out.cos_theta_r > 0.0)) {
    throw std::invalid_argument(
        "snell_directions: incident direction must point into the surface");
  }
  out.reflected = omega_i + n * (2.0 * out.cos_theta_r);
  out.cos_theta_t = transmitted_cosine(out.cos_theta_r, eta);
  if (out.cos_theta_t) {
    out.transmitted =
        omega_i * eta + n * (eta * out.cos_theta_r - *out.cos_theta_t);
  }
  return out;
}

double fresnel_amplitude(double z1, double z2, double cos_theta_r,
                         std::optional<double> cos_theta_t) {
  if (!cos_theta_t) return 1.0;
  const double a = z1 * cos_theta_r;
  const double b = z2 * *cos_theta_t;
  if (a + b == 0.0) return 1.0;
  return (a - b) / (a + b);
}

Branch choose_branch(double a_r_squared, RandomStream& rng) {
  return rng.uniform() < a_r_squared ? Branch::kReflect : Branch::kTransmit;
}

double ggx_density(const Vec3& n, const Vec3& h, double alpha) {
  const double cos_h = dot(n, h);
  if (cos_h <= 0.0) return 0.0;
  const double a2 = alpha * alpha;
  const double d = cos_h * cos_h * (a2 - 1.0) + 1.0;
  return a2 / (kPi * d * d);
}

MicrofacetSample sample_microfacet_normal(const Vec3& n, double alpha,
                                          RandomStream& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  // tan^2(theta) = alpha^2 u1 / (1 - u1); u1 < 1 always.
  const double tan2 = alpha * alpha * u1 / (1.0 - u1);
  const double cos_theta = 1.0 / std::sqrt(1.0 + tan2);
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = 2.0 * kPi * u2;
  Vec3 t, b;
  orthonormal_basis(n, &t, &b);
  MicrofacetSample s;
  s.half_vector = normalize(t * (sin_theta * std::cos(phi)) +
                            b * (sin_theta * std::sin(phi)) + n * cos_theta);
  s.density = ggx_density(n, s.half_vector, alpha) * dot(n, s.half_vector);
  return s;
}

std::optional<InterfaceEvent> scatter(const Hit& hit, const Vec3& omega_i,
                                      std::pair<double, double> impedances,
                                      double alpha, RandomStream& rng) {
  const auto [z1, z2] = impedances;
  const Vec3& n = hit.geometric_normal;
  for (int attempt = 0; attempt < kMaxScatterAttempts; ++attempt) {
    const MicrofacetSample micro = sample_microfacet_normal(n, alpha, rng);
    const Vec3& h = micro.half_vector;
    const double cos_r = dot(h, -omega_i);
    if (cos_r <= 0.0) {
      // Facet faces away from the ray; still consume the branch variate so
      // every attempt draws the same number of values.
      rng.uniform();
      continue;
    }
    InterfaceEvent ev;
    ev.eta = z1 / z2;
    ev.cos_theta_r = cos_r;
    ev.cos_theta_t = transmitted_cosine(cos_r, ev.eta);
    ev.a_r = fresnel_amplitude(z1, z2, cos_r, ev.cos_theta_t);
    ev.density = micro.density;
    ev.branch = choose_branch(ev.a_r * ev.a_r, rng);
    if (ev.branch == Branch::kReflect) {
      ev.out_direction = normalize(omega_i + h * (2.0 * cos_r));
      if (dot(ev.out_direction, n) <= 0.0) continue;
      ev.throughput_weight = ev.a_r < 0.0 ? -1.0 : 1.0;
    } else {
      ev.out_direction = normalize(omega_i * ev.eta +
                                   h * (ev.eta * cos_r - *ev.cos_theta_t));
      if (dot(ev.out_direction, n) >= 0.0) continue;
      ev.throughput_weight = 1.0;
    }
    return ev;
  }
  return std::nullopt;
}

ReflectionEval evaluate_reflection(const Hit& hit, const Vec3& omega_i,
                                   const Vec3& omega_target,
                                   std::pair<double, double> impedances,
                                   double alpha) {
  const Vec3& n = hit.geometric_normal;
  ReflectionEval out;
  if (dot(omega_target, n) <= 0.0) return out;
  const Vec3 sum = omega_target - omega_i;
  const double len = length(sum);
  if (len == 0.0) return out;
  const Vec3 h = sum / len;
  const double cos_h = dot(n, h);
  const double cos_r = dot(h, -omega_i);
  const double cos_o = dot(omega_target, h);
  if (cos_h <= 0.0 || cos_r <= 0.0 || cos_o <= 0.0) return out;
  const auto [z1, z2] = impedances;
  out.a_r = fresnel_amplitude(z1, z2, cos_r, transmitted_cosine(cos_r, z1 / z2));
  out.value = out.a_r * out.a_r * ggx_density(n, h, alpha) * cos_h /
              (4.0 * cos_o);
  return out;
}

std::optional<double> straight_through_factor(
    const Vec3& n, const Vec3& direction,
    std::pair<double, double> impedances) {
  const auto [z1, z2] = impedances;
  const double cos_r = std::abs(dot(n, direction));
  const auto cos_t = transmitted_cosine(cos_r, z1 / z2);
  if (!cos_t) return std::nullopt;
  const double a_r = fresnel_amplitude(z1, z2, cos_r, cos_t);
  return (1.0 + a_r) * (1.0 - a_r * a_r);
}

}  // namespace sonotrace
