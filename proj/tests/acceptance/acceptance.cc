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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "sonotrace/acoustics.h"
#include "sonotrace/config.h"
#include "sonotrace/dsp.h"
#include "sonotrace/pipeline.h"
#include "sonotrace/rf_io.h"
#include "sonotrace/tracer.h"

namespace sonotrace {
namespace {

namespace fs = std::filesystem;
using testing::kBoneZ;
using testing::kSpeed;
using testing::kWaterZ;

const fs::path kScenes = SONOTRACE_SCENES_DIR;
constexpr double kDeg = kPi / 180.0;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// Reflection amplitude and A_r^2 branch frequency on random interfaces.
Outcome fresnel_energy() {
  constexpr int kTriples = 1000;
  constexpr int kDraws = 100000;
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> log_z(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> angle(0.0, 0.5 * kPi);
  const Vec3 n{0, 0, -1};

  int bad_amplitude = 0, beyond_3sigma = 0;
  double worst_amp_err = 0.0, z_sum = 0.0;
  for (int i = 0; i < kTriples;) {
    const double z1 = std::exp(log_z(gen));
    const double z2 = std::exp(log_z(gen));
    const double theta = angle(gen);
    const double eta = z1 / z2;
    const double sin_t2 = eta * eta * std::sin(theta) * std::sin(theta);
    if (sin_t2 >= 1.0) continue;  // TIR triples are excluded
    const double cos_r = std::cos(theta);
    const double cos_t = std::sqrt(1.0 - sin_t2);
    const double oracle =
        (z1 * cos_r - z2 * cos_t) / (z1 * cos_r + z2 * cos_t);

    const Vec3 wi{std::sin(theta), 0.0, std::cos(theta)};
    const SnellResult s = snell_directions(wi, n, eta);
    const double a_r = fresnel_amplitude(z1, z2, s.cos_theta_r, s.cos_theta_t);
    const double a2 = a_r * a_r;
    worst_amp_err = std::max(worst_amp_err, std::abs(a_r - oracle));
    if (!(a2 >= 0.0 && a2 <= 1.0) || std::abs(a_r - oracle) > 1e-9) {
      ++bad_amplitude;
    }

    RandomStream rng(2024, static_cast<uint64_t>(i));
    int reflect = 0;
    for (int d = 0; d < kDraws; ++d) {
      reflect += choose_branch(a2, rng) == Branch::kReflect;
    }
    const double var = kDraws * a2 * (1.0 - a2);
    const double z = var > 0.0 ? (reflect - kDraws * a2) / std::sqrt(var)
                               : (reflect == std::lround(kDraws * a2) ? 0 : 99);
    beyond_3sigma += std::abs(z) > 3.0;
    z_sum += z;
    ++i;
  }
  // Independent triples: P(|z| > 3) = 0.0027 each, so the count is
  // Binomial(1000, 0.0027); 9 is its 99.9 % quantile.
  const double pooled_z = z_sum / std::sqrt(static_cast<double>(kTriples));

  const double wb = fresnel_amplitude(kWaterZ, kBoneZ, 1.0, 1.0);
  const double wb_oracle =
      std::pow((kWaterZ - kBoneZ) / (kWaterZ + kBoneZ), 2.0);
  const bool ok = bad_amplitude == 0 && beyond_3sigma <= 9 &&
                  std::abs(pooled_z) <= 3.0 &&
                  std::abs(wb * wb - 0.44922) <= 1e-5 &&
                  std::abs(wb * wb - wb_oracle) <= 1e-15;
  return {ok, format("amp_err=%.1e bad=%d |z|>3:%d/1000 pooled_z=%.2f "
                     "water/bone A_r^2=%.6f",
                     worst_amp_err, bad_amplitude, beyond_3sigma, pooled_z,
                     wb * wb)};
}

// Forward-then-inverse refraction, eta = 1 identity and the TIR condition.
Outcome snell_suite() {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> log_eta(std::log(0.2), std::log(5.0));
  int tir_mismatch = 0, identity_mismatch = 0, tir_cases = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 n = testing::random_unit(gen);
    Vec3 wi = testing::random_unit(gen);
    if (dot(n, wi) > 0.0) wi = -wi;
    if (dot(n, -wi) < 1e-3) continue;  // grazing
    const double eta = std::exp(log_eta(gen));

    const SnellResult same = snell_directions(wi, n, 1.0);
    if (!same.transmitted || !(*same.transmitted == wi)) ++identity_mismatch;

    const double c = dot(n, -wi);
    const bool tir = 1.0 - eta * eta * (1.0 - c * c) < 0.0;
    const SnellResult fwd = snell_directions(wi, n, eta);
    tir_cases += tir;
    if (fwd.total_internal_reflection() != tir) ++tir_mismatch;
    if (tir || !fwd.transmitted) continue;
    const Vec3 wt = *fwd.transmitted;
    const SnellResult back = snell_directions(-wt, -n, 1.0 / eta);
    if (!back.transmitted) {
      worst = 1.0;
      continue;
    }
    worst = std::max(worst, length(*back.transmitted + wi));
  }
  const bool ok = worst <= 1e-6 && tir_mismatch == 0 && identity_mismatch == 0;
  return {ok, format("reciprocity_err=%.1e tir_cases=%d tir_mismatch=%d "
                     "eta1_mismatch=%d",
                     worst, tir_cases, tir_mismatch, identity_mismatch)};
}

// Projected-area normalization of D and the median of sampled polar angles.
Outcome ggx_normalization() {
  const Vec3 n{0, 0, 1};
  std::string detail;
  bool ok = true;
  for (double alpha : {0.1, 0.5, 1.0}) {
    // 1000 jittered polar strata x 1000 azimuths.
    constexpr int kStrata = 1000, kPerStratum = 1000;
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double sum = 0.0;
    for (int i = 0; i < kStrata; ++i) {
      for (int j = 0; j < kPerStratum; ++j) {
        const double th = (i + u(gen)) / kStrata * 0.5 * kPi;
        const double ph = 2.0 * kPi * u(gen);
        const Vec3 h{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                     std::cos(th)};
        sum += ggx_density(n, h, alpha) * std::cos(th) * std::sin(th);
      }
    }
    const double integral =
        sum / (kStrata * kPerStratum) * (0.5 * kPi) * (2.0 * kPi);

    // tan^2 theta = alpha^2 u / (1 - u) at u = 1/2.
    constexpr int kSamples = 4000000;
    RandomStream rng(13, static_cast<uint64_t>(alpha * 10));
    std::vector<double> theta(kSamples);
    for (double& t : theta) {
      const Vec3 h = sample_microfacet_normal(n, alpha, rng).half_vector;
      t = std::acos(std::clamp(dot(n, h), -1.0, 1.0));
    }
    std::nth_element(theta.begin(), theta.begin() + kSamples / 2, theta.end());
    const double median_err = std::abs(theta[kSamples / 2] - std::atan(alpha));

    ok = ok && std::abs(integral - 1.0) <= 0.01 && median_err <= 1e-3;
    detail += format("a=%.1f: int=%.5f med_err=%.1e  ", alpha, integral,
                     median_err);
  }
  return {ok, detail};
}

// Random triangle soup inside a 1 m cube.
Scene soup(int triangles, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> pos(-0.5, 0.5), size(-0.05, 0.05);
  std::vector<Mesh> meshes;
  const int per_mesh = 500;
  for (int first = 0; first < triangles; first += per_mesh) {
    Mesh m;
    m.name = "soup" + std::to_string(first);
    for (int t = first; t < std::min(triangles, first + per_mesh); ++t) {
      const Vec3 c{pos(gen), pos(gen), pos(gen)};
      for (;;) {
        const Vec3 a = c + Vec3{size(gen), size(gen), size(gen)};
        const Vec3 b = c + Vec3{size(gen), size(gen), size(gen)};
        const Vec3 d = c + Vec3{size(gen), size(gen), size(gen)};
        if (0.5 * length(cross(b - a, d - a)) > 1e-6) {
          const auto base = static_cast<uint32_t>(m.vertices.size());
          m.vertices.insert(m.vertices.end(), {a, b, d});
          m.triangles.push_back({base, base + 1, base + 2});
          break;
        }
      }
    }
    meshes.push_back(std::move(m));
  }
  return testing::bone_scene(std::move(meshes));
}

Outcome bvh_equivalence() {
  int mismatches = 0, hits = 0, rays = 0;
  for (auto [count, seed] : {std::pair{1000, 1}, {5000, 2}, {10000, 3}}) {
    const Scene scene = soup(count, seed);
    const Accelerator accel(scene);
    std::mt19937_64 gen(seed + 100);
    std::uniform_real_distribution<double> pos(-0.7, 0.7);
    for (int r = 0; r < 10000; ++r, ++rays) {
      const Vec3 o{pos(gen), pos(gen), pos(gen)};
      const Vec3 d = testing::random_unit(gen);
      const auto got = accel.intersect(o, d, kInfinity);
      const auto want = testing::brute_force_intersect(scene, o, d, kInfinity);
      if (got.has_value() != want.has_value()) {
        ++mismatches;
        continue;
      }
      if (!got) continue;
      ++hits;
      mismatches +=
          got->triangle_index != want->triangle || got->distance_t != want->t;
    }
  }
  return {mismatches == 0,
          format("rays=%d hits=%d mismatches=%d", rays, hits, mismatches)};
}

// Row of the largest lateral mean of `img` within rows [lo, hi).
int brightest_row(const Image2D& img, int lo = 0, int hi = -1) {
  if (hi < 0) hi = img.nz();
  int best = lo;
  double best_v = -1.0;
  for (int iz = lo; iz < hi; ++iz) {
    double m = 0.0;
    for (int ix = 0; ix < img.nx(); ++ix) m += img.at(iz, ix);
    if (m > best_v) {
      best_v = m;
      best = iz;
    }
  }
  return best;
}

int row_of(const BeamformGrid& g, double z) {
  return static_cast<int>(std::lround((z - g.z_min) / g.pixel_pitch));
}

// Broadside echo timing from a plate 50 mm below a linear aperture.
Outcome time_of_flight() {
  const double depth = 0.05;
  const TransducerSpec spec = testing::linear_equivalent_spec();
  const PlaneWaveScheme scheme{{0.0}};
  const Scene scene = testing::bone_scene({testing::plate("plate", depth)});
  const Accelerator accel(scene);
  const Pulse pulse = pulse_kernel(spec.center_frequency, 5, 50e6);
  TraceConfig cfg;
  cfg.rays_per_element = 10000;
  cfg.num_samples = default_num_samples(cfg.max_path_length, kSpeed, 50e6, pulse);
  TraceStats stats;
  const ChannelData raw = trace(scene, accel, spec, scheme, cfg, &stats);
  const ChannelData rf = convolve_channels(raw, pulse);

  // Instantaneous energy is the squared analytic-signal magnitude; rf^2 alone
  // peaks a quarter carrier period off the pulse center.
  Image2D channels(rf.num_elements(), rf.num_samples());
  for (int el = 0; el < rf.num_elements(); ++el) {
    for (int s = 0; s < rf.num_samples(); ++s) {
      channels.at(s, el) = rf.at(0, el, s);
    }
  }
  const Image2D env_rf = envelope(channels);
  int peak = 0;
  double peak_energy = -1.0;
  for (int s = 0; s < rf.num_samples(); ++s) {
    double e = 0.0;
    for (int el = 0; el < rf.num_elements(); ++el) {
      e += env_rf.at(s, el) * env_rf.at(s, el);
    }
    if (e > peak_energy) {
      peak_energy = e;
      peak = s;
    }
  }
  const double t_peak = peak / rf.fs();
  const double t_oracle = 2.0 * depth / kSpeed;

  const BeamformGrid grid{-0.01, 0.01, 0.04, 0.06, 5e-5};
  const Image2D env =
      envelope(das_beamform(rf, spec, scheme, grid, kSpeed).image);
  const int row = brightest_row(env);
  const int want = row_of(grid, depth);
  const bool ok =
      std::abs(t_peak - t_oracle) <= 1.0 / rf.fs() && std::abs(row - want) <= 1;
  return {ok, format("t_peak=%.3f us oracle=%.3f us band=%.3f mm (%+d px) "
                     "deposits=%lld",
                     t_peak * 1e6, t_oracle * 1e6, grid.z(row) * 1e3,
                     row - want, static_cast<long long>(stats.deposits))};
}

// -6 dB lateral width at row iz, interpolated between pixels.
double lateral_width(const Image2D& env, int iz, int ix_peak) {
  const double half = 0.5 * env.at(iz, ix_peak);
  auto edge = [&](int step) {
    int ix = ix_peak;
    while (ix + step >= 0 && ix + step < env.nx() &&
           env.at(iz, ix + step) >= half) {
      ix += step;
    }
    if (ix + step < 0 || ix + step >= env.nx()) return static_cast<double>(ix);
    const double a = env.at(iz, ix), b = env.at(iz, ix + step);
    return ix + step * (a - half) / (a - b);
  };
  return edge(1) - edge(-1);
}

Outcome plane_wave_steering() {
  const double theta = 30 * kDeg;
  // Emission delays at z = 0 follow x sin(theta) / c.
  const TransducerSpec linear = testing::linear_equivalent_spec();
  double worst = 0.0;
  const double t0 = plane_wave_delay(linear, theta, {0, 0, 0}, kSpeed);
  for (int i = -100; i <= 100; ++i) {
    const double x = i * 1e-4;
    const double t = plane_wave_delay(linear, theta, {x, 0, 0}, kSpeed) - t0;
    worst = std::max(worst, std::abs(t - x * std::sin(theta) / kSpeed));
  }
  // Every emitted ray starts at its analytic delay.
  const TransducerSpec convex;
  const PlaneWaveScheme steer{{theta}};
  const EmissionSampler sampler(convex, steer, 1.0, kSpeed);
  RandomStream rng(6);
  const double ref = testing::analytic_reference(convex, theta);
  for (int i = 0; i < 10000; ++i) {
    const EmittedRay ray = sampler.sample(rng);
    const double want = (ray.origin.x * std::sin(theta) +
                         ray.origin.z * std::cos(theta) - ref) /
                        kSpeed;
    worst = std::max(worst, std::abs(ray.emission_delay - want));
  }

  const double fs = 50e6;
  const double sigma = pulse_kernel(convex.center_frequency, 5, fs).sigma;
  const PlaneWaveScheme compound = linspace_scheme(-30 * kDeg, 30 * kDeg, 25);
  const PlaneWaveScheme single{{0.0}};
  const Vec3 target{0, 0, 0.03};
  const BeamformGrid grid{-0.003, 0.003, 0.027, 0.033, 2.5e-5};
  auto image = [&](const PlaneWaveScheme& scheme) {
    const ChannelData rf = testing::point_target_rf(
        convex, scheme, target, 4000, kSpeed, sigma, convex.center_frequency,
        fs);
    return envelope(das_beamform(rf, convex, scheme, grid, kSpeed).image);
  };
  const Image2D env25 = image(compound);
  const Image2D env1 = image(single);
  auto argmax = [](const Image2D& img) {
    const auto it = std::max_element(img.data().begin(), img.data().end());
    const auto i = static_cast<int>(it - img.data().begin());
    return std::pair{i / img.nx(), i % img.nx()};
  };
  const auto [iz, ix] = argmax(env25);
  const double dx = std::abs(grid.x(ix) - target.x);
  const double dz = std::abs(grid.z(iz) - target.z);
  const auto [iz1, ix1] = argmax(env1);
  const double w25 = lateral_width(env25, iz, ix) * grid.pixel_pitch;
  const double w1 = lateral_width(env1, iz1, ix1) * grid.pixel_pitch;
  const double half_px = 0.5 * grid.pixel_pitch + 1e-12;
  const bool ok = worst <= 1e-12 && dx <= half_px && dz <= half_px && w25 < w1;
  return {ok, format("delay_err=%.1e s peak=(%.4f, %.4f) mm "
                     "width25=%.3f mm width1=%.3f mm",
                     worst, grid.x(ix) * 1e3, grid.z(iz) * 1e3, w25 * 1e3,
                     w1 * 1e3)};
}

// Variance of the peak summed-channel amplitude across seeds against N.
Outcome mc_convergence() {
  SimConfig config = parse_config(kScenes / "flat_plate.ini");
  config.angles_deg = {0.0};
  const Scene scene = build_scene(config);
  const Accelerator accel(scene);
  const TransducerSpec spec = config.transducer();
  const PlaneWaveScheme scheme = config.scheme();
  const Pulse pulse = config.pulse();
  TraceConfig cfg = config.trace_config();
  // The peak is the first plate echo; later bounces arrive after it and would
  // only multiply the runtime.
  cfg.max_bounces = 1;

  std::vector<double> log_n, log_var;
  std::string detail;
  for (int64_t n : {1000, 10000, 100000}) {
    cfg.rays_per_element = n;
    std::vector<double> peaks;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
      cfg.seed = seed;
      const ChannelData rf =
          convolve_channels(trace(scene, accel, spec, scheme, cfg), pulse);
      double peak = 0.0;
      for (int s = 0; s < rf.num_samples(); ++s) {
        double sum = 0.0;
        for (int el = 0; el < rf.num_elements(); ++el) sum += rf.at(0, el, s);
        peak = std::max(peak, std::abs(sum));
      }
      peaks.push_back(peak);
    }
    const double mean =
        std::accumulate(peaks.begin(), peaks.end(), 0.0) / peaks.size();
    double var = 0.0;
    for (double p : peaks) var += (p - mean) * (p - mean);
    var /= peaks.size() - 1;
    log_n.push_back(std::log(static_cast<double>(n)));
    log_var.push_back(std::log(var));
    detail += format("N=%lld mean=%.3e var=%.3e  ", static_cast<long long>(n),
                     mean, var);
  }
  const double mx = std::accumulate(log_n.begin(), log_n.end(), 0.0) / 3;
  const double my = std::accumulate(log_var.begin(), log_var.end(), 0.0) / 3;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (log_n[i] - mx) * (log_var[i] - my);
    sxx += (log_n[i] - mx) * (log_n[i] - mx);
  }
  const double slope = sxy / sxx;
  return {std::abs(slope + 1.0) <= 0.2, format("slope=%.3f  ", slope) + detail};
}

// Largest dB value over the hidden plate (|x| < 6 mm, z 44-49 mm) and the
// trace statistics for one secondary-ray mode of the pocket scene.
std::pair<double, TraceStats> pocket_shadow(SecondaryMode mode) {
  SimConfig config = parse_config(kScenes / "pocket.ini");
  config.secondary_mode = mode;
  const Scene scene = build_scene(config);
  const Accelerator accel(scene);
  const TransducerSpec spec = config.transducer();
  const PlaneWaveScheme scheme = config.scheme();
  // Only the shadow box is imaged; log compression still needs the global
  // maximum, which sits on the occluder at 25 mm.
  BeamformGrid grid = config.grid;
  grid.x_min = -0.008;
  grid.x_max = 0.008;
  TraceStats stats;
  const ChannelData raw =
      trace(scene, accel, spec, scheme, config.trace_config(), &stats);
  const ChannelData rf = convolve_channels(raw, config.pulse());
  const BeamformOptions options{config.f_number, config.apodization};
  const Image2D env = envelope(
      das_beamform(rf, spec, scheme, grid, config.speed_of_sound, options)
          .image);
  const BModeImage bmode = log_compress(env, config.dynamic_range_db, grid);
  double shadow_max = -config.dynamic_range_db;
  for (int iz = row_of(grid, 0.044); iz <= row_of(grid, 0.049); ++iz) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      if (std::abs(grid.x(ix)) >= 0.006) continue;
      shadow_max = std::max(shadow_max, bmode.values_db.at(iz, ix));
    }
  }
  return {shadow_max, stats};
}

// Binary mode hides the plate behind the occluder; transmissive mode is the
// contrast that shows the region is not trivially empty.
Outcome occlusion() {
  const auto [binary_db, stats] = pocket_shadow(SecondaryMode::kBinary);
  const auto [transmissive_db, unused] =
      pocket_shadow(SecondaryMode::kTransmissive);
  const bool ok = stats.cancelled_occluded > 0 && binary_db <= -60.0;
  return {ok, format("cancelled=%lld deposits=%lld shadow_max=%.1f dB "
                     "(transmissive %.1f dB)",
                     static_cast<long long>(stats.cancelled_occluded),
                     static_cast<long long>(stats.deposits), binary_db,
                     transmissive_db)};
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism_and_formats() {
  const fs::path root = fs::temp_directory_path() / "sonotrace_acceptance";
  fs::remove_all(root);
  SimConfig config = parse_config(kScenes / "flat_plate.ini");
  config.rays_per_element = 1000;
  RunOptions opt;
  opt.threads = 1;
  opt.dump_rf = true;
  opt.output_dir = root / "a";
  const RunResult a = run(config, opt);
  opt.output_dir = root / "b";
  const RunResult b = run(config, opt);
  const bool same_image = read_bytes(a.image_path) == read_bytes(b.image_path);
  const bool same_rf = read_bytes(a.rf_path) == read_bytes(b.rf_path);

  // URRF: values are stored as f32, so use f32-representable data.
  ChannelData ch(3, 7, 123, 40e6);
  std::mt19937 gen(9);
  std::normal_distribution<float> g;
  for (double& v : ch.data()) v = g(gen);
  write_urrf(ch, root / "rt.urrf");
  const ChannelData ch2 = read_urrf(root / "rt.urrf");
  const bool urrf_ok = ch2.num_events() == 3 && ch2.num_elements() == 7 &&
                       ch2.num_samples() == 123 && ch2.fs() == 40e6 &&
                       ch2.data() == ch.data();

  BModeImage img;
  img.dynamic_range_db = 60.0;
  img.values_db = Image2D(17, 9);
  std::vector<uint8_t> want;
  for (int iz = 0; iz < 9; ++iz) {
    for (int ix = 0; ix < 17; ++ix) {
      img.values_db.at(iz, ix) = -60.0 * ((iz * 17 + ix) % 61) / 60.0;
      want.push_back(gray_level(img.values_db.at(iz, ix), 60.0));
    }
  }
  export_image(img, root / "rt.pgm");
  const GrayImage pgm = read_pgm(root / "rt.pgm");
  const bool pgm_ok = pgm.width == 17 && pgm.height == 9 && pgm.pixels == want;
  fs::remove_all(root);
  return {same_image && same_rf && urrf_ok && pgm_ok,
          format("image_identical=%d rf_identical=%d urrf_roundtrip=%d "
                 "pgm_roundtrip=%d",
                 same_image, same_rf, urrf_ok, pgm_ok)};
}

Outcome throughput() {
  const SimConfig config = parse_config(kScenes / "flat_plate.ini");
  const Scene scene = build_scene(config);
  const Accelerator accel(scene);
  TraceStats stats;
  const auto start = std::chrono::steady_clock::now();
  trace(scene, accel, config.transducer(), config.scheme(),
        config.trace_config(), &stats);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return {stats.rays_emitted == 1280000 && secs < 60.0,
          format("rays=%lld trace=%.2f s threads=%d",
                 static_cast<long long>(stats.rays_emitted), secs,
                 omp_get_max_threads())};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> check;
  double limit_s;  // 0: no runtime bound
};

}  // namespace
}  // namespace sonotrace

int main(int argc, char** argv) {
  using namespace sonotrace;
  const std::vector<Criterion> criteria = {
      {"fresnel_energy", fresnel_energy, 10},
      {"snell", snell_suite, 5},
      {"ggx_normalization", ggx_normalization, 30},
      {"bvh_equivalence", bvh_equivalence, 60},
      {"time_of_flight", time_of_flight, 120},
      {"plane_wave_steering", plane_wave_steering, 60},
      {"mc_convergence", mc_convergence, 600},
      {"occlusion", occlusion, 0},
      {"determinism_formats", determinism_and_formats, 0},
      {"throughput", throughput, 0},
  };
  // Optional arguments select criteria by name.
  const std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool in_time = c.limit_s == 0 || secs < c.limit_s;
    const bool ok = out.ok && in_time;
    failed += !ok;
    std::printf("%s %-20s %7.2f s%s  %s\n", ok ? "PASS" : "FAIL", c.name, secs,
                in_time ? "" : " (over time limit)", out.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
