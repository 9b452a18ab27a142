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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.h"

namespace sonotrace {
namespace {

constexpr double kDeg = kPi / 180.0;

TEST(ElementGeometryTest, ElementsLieOnArcWithRadialNormals) {
  const TransducerSpec spec;
  const Vec3 cc = spec.curvature_center();
  EXPECT_EQ(cc, (Vec3{0, 0, -0.06}));
  for (int e = 0; e < spec.num_elements; ++e) {
    const ElementGeometry g = element_geometry(spec, e);
    EXPECT_NEAR(length(g.center - cc), spec.radius, 1e-15);
    EXPECT_TRUE(is_unit(g.normal, 1e-12));
    EXPECT_NEAR(length(cross(g.normal, g.center - cc)), 0.0, 1e-15);
    const Vec3 want = testing::analytic_element_center(spec, e);
    EXPECT_NEAR(length(g.center - want), 0.0, 1e-15);
  }
  // End elements span the opening angle symmetrically.
  const ElementGeometry first = element_geometry(spec, 0);
  const ElementGeometry last = element_geometry(spec, spec.num_elements - 1);
  EXPECT_NEAR(std::acos(dot(first.normal, last.normal)), 70.0 * kDeg, 1e-12);
  EXPECT_NEAR(first.center.x, -last.center.x, 1e-15);
}

TEST(ElementGeometryTest, OddCountPutsMiddleElementAtApex) {
  TransducerSpec spec;
  spec.num_elements = 5;
  const ElementGeometry mid = element_geometry(spec, 2);
  EXPECT_NEAR(length(mid.center - spec.center), 0.0, 1e-15);
  EXPECT_EQ(mid.normal, spec.axis);
  EXPECT_THROW(element_geometry(spec, 5), std::out_of_range);
  EXPECT_THROW(element_geometry(spec, -1), std::out_of_range);
}

TEST(ElementGeometryTest, LinearEquivalentPitch) {
  const TransducerSpec spec = testing::linear_equivalent_spec();
  const auto els = all_elements(spec);
  for (int e = 1; e < spec.num_elements; ++e) {
    EXPECT_NEAR(els[e].center.x - els[e - 1].center.x, 0.3e-3, 1e-9);
    EXPECT_LT(std::abs(els[e].center.z), 2e-6);
  }
}

TEST(PlaneWaveDelayTest, MatchesAnalyticFormulaOnConvexArray) {
  const TransducerSpec spec;
  for (double deg : {-30.0, -12.5, 0.0, 7.5, 30.0}) {
    const double a = deg * kDeg;
    const double ref = testing::analytic_reference(spec, a);
    EXPECT_NEAR(aperture_reference(spec, a), ref, 1e-15);
    for (int e = 0; e < spec.num_elements; ++e) {
      const Vec3 c = testing::analytic_element_center(spec, e);
      const double want =
          (c.x * std::sin(a) + c.z * std::cos(a) - ref) / testing::kSpeed;
      EXPECT_NEAR(plane_wave_delay(spec, a, c, testing::kSpeed), want, 1e-15);
      EXPECT_GE(plane_wave_delay(spec, a, c, testing::kSpeed), -1e-18);
    }
  }
}

TEST(PlaneWaveDelayTest, LateralDelayIsXSinThetaOverC) {
  const TransducerSpec spec = testing::linear_equivalent_spec();
  const double a = 30.0 * kDeg;
  const double base = plane_wave_delay(spec, a, {0, 0, 0}, testing::kSpeed);
  for (double x = -0.019; x <= 0.019; x += 0.001) {
    const double d = plane_wave_delay(spec, a, {x, 0, 0}, testing::kSpeed);
    EXPECT_NEAR(d - base, x * std::sin(a) / testing::kSpeed, 1e-12);
  }
}

TEST(PlaneWaveDelayTest, BroadsideFiresApexLast) {
  const TransducerSpec spec;
  const double apex = plane_wave_delay(spec, 0.0, spec.center, testing::kSpeed);
  EXPECT_NEAR(apex, spec.radius * (1 - std::cos(35 * kDeg)) / testing::kSpeed,
              1e-15);
}

TEST(SchemeTest, LinspaceAndValidation) {
  const PlaneWaveScheme s = linspace_scheme(-30 * kDeg, 30 * kDeg, 25);
  ASSERT_EQ(s.size(), 25u);
  EXPECT_EQ(s.angles.front(), -30 * kDeg);
  EXPECT_EQ(s.angles.back(), 30 * kDeg);
  EXPECT_NEAR(s.angles[12], 0.0, 1e-15);
  EXPECT_NO_THROW(validate(s));
  EXPECT_THROW(validate(PlaneWaveScheme{}), std::invalid_argument);
  EXPECT_THROW(validate(PlaneWaveScheme{{0.1, 0.1}}), std::invalid_argument);
  EXPECT_THROW(validate(PlaneWaveScheme{{0.5 * kPi}}), std::invalid_argument);
  EXPECT_EQ(linspace_scheme(0.2, 0.4, 1).angles, std::vector<double>{0.2});
}

TEST(SpecValidateTest, RejectsBadFields) {
  EXPECT_NO_THROW(validate(TransducerSpec{}));
  TransducerSpec s;
  s.num_elements = 0;
  EXPECT_THROW(validate(s), std::invalid_argument);
  s = {};
  s.radius = -1;
  EXPECT_THROW(validate(s), std::invalid_argument);
  s = {};
  s.main_beam_angle = 5 * kDeg;
  EXPECT_THROW(validate(s), std::invalid_argument);
  s = {};
  s.lateral = {0, 0, 1};
  EXPECT_THROW(validate(s), std::invalid_argument);
}

TEST(EmissionTest, RaysStartOnSurfaceWithCosineWeightAndNonNegativeDelay) {
  const TransducerSpec spec;
  const PlaneWaveScheme scheme = linspace_scheme(-30 * kDeg, 30 * kDeg, 25);
  const EmissionSampler sampler(spec, scheme, 1000.0, testing::kSpeed);
  std::vector<int> counts(scheme.size(), 0);
  const int n = 100000;
  for (int r = 0; r < n; ++r) {
    RandomStream rng(1, r);
    const EmittedRay ray = sampler.sample(rng);
    const Vec3 rel = ray.origin - spec.curvature_center();
    const double y = dot(rel, spec.elevation());
    const Vec3 in_plane = rel - spec.elevation() * y;
    ASSERT_NEAR(length(in_plane), spec.radius, 1e-12);
    ASSERT_LE(std::abs(y), 0.5 * spec.elevational_extent);
    const double phi = std::atan2(in_plane.x, in_plane.z);
    ASSERT_LE(std::abs(phi), 35 * kDeg + 1e-12);
    ASSERT_TRUE(is_unit(ray.direction));
    const Vec3 normal = in_plane / spec.radius;
    ASSERT_NEAR(ray.pressure,
                std::max(0.0, dot(ray.direction, normal)) / 1000.0, 1e-15);
    ASSERT_GE(ray.emission_delay, 0.0);
    ASSERT_NEAR(ray.emission_delay,
                plane_wave_delay(spec, scheme.angles[ray.event_index],
                                 ray.origin, testing::kSpeed),
                1e-15);
    ++counts[ray.event_index];
  }
  // Uniform event choice: each count within 4 sigma of n / 25.
  const double p = 1.0 / 25;
  for (int c : counts) {
    EXPECT_NEAR(c, n * p, 4 * std::sqrt(n * p * (1 - p)));
  }
}

TEST(EmissionTest, SampleEmissionMatchesSampler) {
  const TransducerSpec spec;
  const PlaneWaveScheme scheme{{0.0}};
  RandomStream a(9, 4);
  RandomStream b(9, 4);
  const EmittedRay x = sample_emission(spec, scheme, 10.0, 1540.0, a);
  const EmittedRay y = EmissionSampler(spec, scheme, 10.0, 1540.0).sample(b);
  EXPECT_EQ(x.origin, y.origin);
  EXPECT_EQ(x.pressure, y.pressure);
  EXPECT_EQ(x.event_index, 0);
}

TEST(DirectivityTest, RampBetweenMainBeamAndCutoff) {
  TransducerSpec spec;
  spec.main_beam_angle = 2 * kDeg;
  spec.cutoff_angle = 6 * kDeg;
  const Vec3 n{0, 0, 1};
  auto at = [&](double deg) {
    return receive_directivity(spec, {std::sin(deg * kDeg), 0, std::cos(deg * kDeg)},
                               n);
  };
  EXPECT_EQ(at(0.0), 1.0);
  EXPECT_EQ(at(1.9), 1.0);
  EXPECT_NEAR(at(4.0), 0.5, 1e-9);
  EXPECT_EQ(at(6.5), 0.0);
  EXPECT_EQ(at(90.0), 0.0);
}

TEST(DirectivityTest, EqualAnglesGiveHardStep) {
  const TransducerSpec spec;  // 2 deg / 2 deg
  const Vec3 n{0, 0, 1};
  EXPECT_EQ(receive_directivity(spec, {std::sin(1.99 * kDeg), 0,
                                       std::cos(1.99 * kDeg)}, n), 1.0);
  EXPECT_EQ(receive_directivity(spec, {std::sin(2.01 * kDeg), 0,
                                       std::cos(2.01 * kDeg)}, n), 0.0);
}

TEST(ReceiveTargetTest, UniformOverElements) {
  TransducerSpec spec;
  spec.num_elements = 8;
  RandomStream rng(3);
  std::vector<int> counts(8, 0);
  const int n = 80000;
  for (int i = 0; i < n; ++i) {
    const ReceiveTarget t = sample_receive_target(spec, rng);
    EXPECT_EQ(t.probability, 1.0 / 8);
    ++counts[t.element.index];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 8.0, 4 * std::sqrt(n / 8.0 * 7 / 8));
}

}  // namespace
}  // namespace sonotrace
