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

#include "sonotrace/dsp.h"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace sonotrace {

namespace {

int resolve_threads(int threads) {
  return threads > 0 ? threads : omp_get_max_threads();
}

// Adds `kernel` centered at every nonzero input sample. Channel data from the
// tracer is sparse, so this beats a dense or FFT convolution.
void convolve_trace(std::span<const double> in, std::span<double> out,
                    const std::vector<double>& kernel, int center) {
  const auto n = static_cast<int>(in.size());
  const auto k = static_cast<int>(kernel.size());
  for (int j = 0; j < n; ++j) {
    const double x = in[j];
    if (x == 0.0) continue;
    const int lo = std::max(0, center - j);
    const int hi = std::min(k, n - j + center);
    for (int m = lo; m < hi; ++m) out[j + m - center] += x * kernel[m];
  }
}

struct ElementCache {
  Vec3 center;
  Vec3 normal;
};

struct EventCache {
  Vec3 direction;
  double reference;
};

struct BeamformSetup {
  std::vector<ElementCache> elements;
  std::vector<EventCache> events;
};

BeamformSetup make_setup(const ChannelData& rf, const TransducerSpec& spec,
                         const PlaneWaveScheme& scheme,
                         const BeamformGrid& grid) {
  validate(grid);
  if (rf.num_events() != static_cast<int>(scheme.size()) ||
      rf.num_elements() != spec.num_elements) {
    throw std::invalid_argument(
        "channel data shape does not match transducer and scheme");
  }
  BeamformSetup setup;
  for (const ElementGeometry& g : all_elements(spec)) {
    setup.elements.push_back({g.center, g.normal});
  }
  for (double angle : scheme.angles) {
    setup.events.push_back(
        {steering_direction(spec, angle), aperture_reference(spec, angle)});
  }
  return setup;
}


// Columns per work unit. Neighboring columns read nearly the same samples, so
// a tile keeps each trace segment in cache while all its columns use it.
constexpr int kTileColumns = 16;

struct TileScratch {
  std::vector<double> tx;       // [event][pixel]
  std::vector<double> partial;  // [event][pixel]
  std::vector<double> rx;       // [pixel]
  std::vector<double> weight;   // [pixel]
  std::vector<char> valid;      // [pixel]
};

// Beamforms columns [ix0, ix1). For one pixel the per-event partial sums run
// over elements in index order and are then added in event order, so the
// result does not depend on tiling or threads.
int64_t beamform_tile(const ChannelData& rf, const BeamformSetup& setup,
                      const TransducerSpec& spec, const BeamformGrid& grid,
                      int ix0, int ix1, double inv_c,
                      const BeamformOptions& options, TileScratch& scratch,
                      Image2D& image) {
  const int n = rf.num_samples();
  const double fs = rf.fs();
  const int nz = grid.nz();
  const size_t np = static_cast<size_t>(ix1 - ix0) * nz;
  const auto nev = setup.events.size();
  const auto num_el = static_cast<int>(setup.elements.size());
  const bool gated = options.f_number > 0.0;
  const double max_angle = gated ? std::atan(0.5 / options.f_number) : kPi;
  auto position = [&](size_t k) {
    return pixel_position(spec, grid.x(ix0 + static_cast<int>(k / nz)),
                          grid.z(static_cast<int>(k % nz)));
  };

  scratch.tx.resize(np * nev);
  scratch.partial.assign(np * nev, 0.0);
  scratch.rx.resize(np);
  scratch.weight.resize(np);
  scratch.valid.assign(np, 1);
  for (size_t k = 0; k < np; ++k) {
    const Vec3 p = position(k);
    for (size_t ev = 0; ev < nev; ++ev) {
      scratch.tx[ev * np + k] =
          (dot(p, setup.events[ev].direction) - setup.events[ev].reference) *
          inv_c;
    }
  }
  for (int e = 0; e < num_el; ++e) {
    const ElementCache& el = setup.elements[e];
    for (size_t k = 0; k < np; ++k) {
      const Vec3 d = position(k) - el.center;
      const double dist = length(d);
      scratch.rx[k] = dist * inv_c;
      double w = 1.0;
      if (gated) {
        const double angle =
            std::acos(std::clamp(dot(d, el.normal) / dist, -1.0, 1.0));
        if (angle > max_angle) {
          w = 0.0;
        } else if (options.apodization == Apodization::kHann) {
          w = 0.5 * (1.0 + std::cos(kPi * angle / max_angle));
        }
      } else if (options.apodization == Apodization::kHann) {
        w = 0.5 * (1.0 - std::cos(2.0 * kPi * (e + 0.5) / num_el));
      }
      scratch.weight[k] = w;
    }
    for (size_t ev = 0; ev < nev; ++ev) {
      const std::span<const double> trace = rf.trace(static_cast<int>(ev), e);
      const double* tx = scratch.tx.data() + ev * np;
      double* partial = scratch.partial.data() + ev * np;
      for (size_t k = 0; k < np; ++k) {
        // Gated-out elements need no samples.
        if (gated && scratch.weight[k] == 0.0) continue;
        const double s = (tx[k] + scratch.rx[k]) * fs;
        const double base = std::floor(s);
        const double frac = s - base;
        const auto i = static_cast<int64_t>(base);
        if (i < 0 || i > n - 1 || (i == n - 1 && frac > 0.0)) {
          scratch.valid[k] = 0;
          continue;
        }
        double v = trace[i] * (1.0 - frac);
        if (frac > 0.0) v += trace[i + 1] * frac;
        partial[k] += scratch.weight[k] * v;
      }
    }
  }
  int64_t out_of_range = 0;
  for (size_t k = 0; k < np; ++k) {
    const int ix = ix0 + static_cast<int>(k / nz);
    const int iz = static_cast<int>(k % nz);
    if (!scratch.valid[k]) {
      image.at(iz, ix) = 0.0;
      ++out_of_range;
      continue;
    }
    double sum = 0.0;
    for (size_t ev = 0; ev < nev; ++ev) sum += scratch.partial[ev * np + k];
    image.at(iz, ix) = sum;
  }
  return out_of_range;
}

}  // namespace

Pulse pulse_kernel(double fc, double cycles, double fs) {
  if (!(fc > 0.0) || !(fs > 2.0 * fc)) {
    throw std::invalid_argument(
        "pulse: sampling frequency must exceed twice the center frequency");
  }
  if (!(cycles >= 1.0)) {
    throw std::invalid_argument("pulse: at least one cycle required");
  }
  Pulse p;
  p.fc = fc;
  p.cycles = cycles;
  p.fs = fs;
  const double half_width = 0.5 * cycles / fc;
  p.sigma = half_width * half_width / std::log(2.0);
  const double t_max = std::sqrt(p.sigma * std::log(1000.0));
  const auto half = static_cast<int>(std::ceil(t_max * fs));
  p.kernel.assign(static_cast<size_t>(2 * half + 1), 0.0);
  for (int k = 1; k <= half; ++k) {
    const double t = k / fs;
    const double v = std::sin(2.0 * kPi * fc * t) * std::exp(-t * t / p.sigma);
    p.kernel[half + k] = v;
    p.kernel[half - k] = -v;
  }
  return p;
}

int default_num_samples(double max_path_length, double speed_of_sound,
                        double fs, const Pulse& pulse) {
  return static_cast<int>(
             std::ceil(2.0 * max_path_length / speed_of_sound * fs)) +
         static_cast<int>(pulse.kernel.size());
}

ChannelData convolve_channels_serial(const ChannelData& channel,
                                     const Pulse& pulse) {
  if (channel.fs() != pulse.fs) {
    throw std::invalid_argument("pulse and channel sampling rates differ");
  }
  ChannelData out(channel.num_events(), channel.num_elements(),
                  channel.num_samples(), channel.fs());
  for (int ev = 0; ev < channel.num_events(); ++ev) {
    for (int e = 0; e < channel.num_elements(); ++e) {
      convolve_trace(channel.trace(ev, e), out.trace(ev, e), pulse.kernel,
                     pulse.center());
    }
  }
  return out;
}

ChannelData convolve_channels(const ChannelData& channel, const Pulse& pulse,
                              int threads) {
  if (channel.fs() != pulse.fs) {
    throw std::invalid_argument("pulse and channel sampling rates differ");
  }
  ChannelData out(channel.num_events(), channel.num_elements(),
                  channel.num_samples(), channel.fs());
  const int rows = channel.num_events() * channel.num_elements();
  const int num_el = channel.num_elements();
#pragma omp parallel for num_threads(resolve_threads(threads)) schedule(dynamic, 4)
  for (int r = 0; r < rows; ++r) {
    convolve_trace(channel.trace(r / num_el, r % num_el),
                   out.trace(r / num_el, r % num_el), pulse.kernel,
                   pulse.center());
  }
  return out;
}

int BeamformGrid::nx() const {
  return static_cast<int>(std::floor((x_max - x_min) / pixel_pitch + 1e-9)) + 1;
}

int BeamformGrid::nz() const {
  return static_cast<int>(std::floor((z_max - z_min) / pixel_pitch + 1e-9)) + 1;
}

void validate(const BeamformGrid& grid) {
  if (!(grid.pixel_pitch > 0.0)) {
    throw std::invalid_argument("pixel pitch must be > 0");
  }
  if (!(grid.x_max > grid.x_min) || !(grid.z_max > grid.z_min)) {
    throw std::invalid_argument("beamform grid extents must be positive");
  }
}

Vec3 pixel_position(const TransducerSpec& spec, double x, double z) {
  return spec.center + spec.lateral * x + spec.axis * z;
}

BeamformResult das_beamform_serial(const ChannelData& rf,
                                   const TransducerSpec& spec,
                                   const PlaneWaveScheme& scheme,
                                   const BeamformGrid& grid,
                                   double speed_of_sound,
                                   const BeamformOptions& options) {
  const BeamformSetup setup = make_setup(rf, spec, scheme, grid);
  BeamformResult result;
  result.image = Image2D(grid.nx(), grid.nz());
  TileScratch scratch;
  for (int ix = 0; ix < grid.nx(); ix += kTileColumns) {
    result.out_of_range_pixels += beamform_tile(
        rf, setup, spec, grid, ix, std::min(grid.nx(), ix + kTileColumns),
        1.0 / speed_of_sound, options, scratch, result.image);
  }
  return result;
}

BeamformResult das_beamform(const ChannelData& rf, const TransducerSpec& spec,
                            const PlaneWaveScheme& scheme,
                            const BeamformGrid& grid, double speed_of_sound,
                            const BeamformOptions& options, int threads) {
  const BeamformSetup setup = make_setup(rf, spec, scheme, grid);
  BeamformResult result;
  result.image = Image2D(grid.nx(), grid.nz());
  const int nx = grid.nx();
  const int num_tiles = (nx + kTileColumns - 1) / kTileColumns;
  int64_t out_of_range = 0;
#pragma omp parallel num_threads(resolve_threads(threads)) reduction(+ : out_of_range)
  {
    TileScratch scratch;
#pragma omp for schedule(dynamic, 1)
    for (int t = 0; t < num_tiles; ++t) {
      const int ix0 = t * kTileColumns;
      out_of_range += beamform_tile(rf, setup, spec, grid, ix0,
                                    std::min(nx, ix0 + kTileColumns),
                                    1.0 / speed_of_sound, options, scratch,
                                    result.image);
    }
  }
  result.out_of_range_pixels = out_of_range;
  return result;
}

Image2D envelope(const Image2D& beamformed, int threads) {
  const int nz = beamformed.nz();
  const int nx = beamformed.nx();
  Image2D out(nx, nz);
  if (nz == 0 || nx == 0) return out;

  // Plans are created once here (planning is not thread safe); execution with
  // per-thread arrays through the new-array interface is.
  fftw_complex* probe_in = fftw_alloc_complex(static_cast<size_t>(nz));
  fftw_complex* probe_out = fftw_alloc_complex(static_cast<size_t>(nz));
  fftw_plan forward = fftw_plan_dft_1d(nz, probe_in, probe_out, FFTW_FORWARD,
                                       FFTW_ESTIMATE);
  fftw_plan backward = fftw_plan_dft_1d(nz, probe_in, probe_out,
                                        FFTW_BACKWARD, FFTW_ESTIMATE);

#pragma omp parallel num_threads(resolve_threads(threads))
  {
    fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(nz));
    fftw_complex* spec = fftw_alloc_complex(static_cast<size_t>(nz));
#pragma omp for schedule(static)
    for (int ix = 0; ix < nx; ++ix) {
      for (int iz = 0; iz < nz; ++iz) {
        buf[iz][0] = beamformed.at(iz, ix);
        buf[iz][1] = 0.0;
      }
      fftw_execute_dft(forward, buf, spec);
      // One-sided spectrum: keep DC (and Nyquist for even lengths), double
      // the positive frequencies, zero the negative ones.
      const int half = nz / 2;
      const int last_positive = (nz % 2 == 0) ? half - 1 : half;
      for (int k = 1; k <= last_positive; ++k) {
        spec[k][0] *= 2.0;
        spec[k][1] *= 2.0;
      }
      for (int k = last_positive + 1 + (nz % 2 == 0 ? 1 : 0); k < nz; ++k) {
        spec[k][0] = 0.0;
        spec[k][1] = 0.0;
      }
      fftw_execute_dft(backward, spec, buf);
      const double scale = 1.0 / nz;
      for (int iz = 0; iz < nz; ++iz) {
        out.at(iz, ix) = std::hypot(buf[iz][0], buf[iz][1]) * scale;
      }
    }
    fftw_free(buf);
    fftw_free(spec);
  }
  fftw_destroy_plan(forward);
  fftw_destroy_plan(backward);
  fftw_free(probe_in);
  fftw_free(probe_out);
  return out;
}

BModeImage log_compress(const Image2D& env, double dynamic_range_db,
                        const BeamformGrid& grid) {
  if (!(dynamic_range_db > 0.0)) {
    throw std::invalid_argument("dynamic range must be > 0 dB");
  }
  double peak = 0.0;
  for (double v : env.data()) peak = std::max(peak, v);
  if (!(peak > 0.0)) {
    throw std::invalid_argument("log_compress: envelope is all zero");
  }
  BModeImage img;
  img.dynamic_range_db = dynamic_range_db;
  img.grid = grid;
  img.values_db = Image2D(env.nx(), env.nz());
  for (size_t i = 0; i < env.data().size(); ++i) {
    const double v = env.data()[i];
    img.values_db.data()[i] =
        v > 0.0 ? std::clamp(20.0 * std::log10(v / peak), -dynamic_range_db,
                             0.0)
                : -dynamic_range_db;
  }
  return img;
}

uint8_t gray_level(double value_db, double dynamic_range_db) {
  const double g = 255.0 * (value_db + dynamic_range_db) / dynamic_range_db;
  return static_cast<uint8_t>(std::clamp<long>(std::lround(g), 0L, 255L));
}

void export_image(const BModeImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image " + path.string());
  const Image2D& v = img.values_db;
  out << "P5\n" << v.nx() << " " << v.nz() << "\n255\n";
  std::vector<char> row(static_cast<size_t>(v.nx()));
  for (int iz = 0; iz < v.nz(); ++iz) {
    for (int ix = 0; ix < v.nx(); ++ix) {
      row[ix] = static_cast<char>(gray_level(v.at(iz, ix), img.dynamic_range_db));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw std::runtime_error("failed writing image " + path.string());
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string magic;
  int maxval = 0;
  GrayImage img;
  in >> magic >> img.width >> img.height >> maxval;
  if (magic != "P5" || maxval != 255 || img.width <= 0 || img.height <= 0) {
    throw std::runtime_error("not an 8-bit P5 graymap: " + path.string());
  }
  in.get();  // single whitespace after the header
  img.pixels.resize(static_cast<size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (!in) throw std::runtime_error("truncated graymap " + path.string());
  return img;
}

}  // namespace sonotrace
