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

// Image formation from channel data: pulse convolution, plane-wave
// delay-and-sum with coherent compounding, envelope detection and log
// compression.

#ifndef SONOTRACE_DSP_H_
#define SONOTRACE_DSP_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sonotrace/tracer.h"
#include "sonotrace/transducer.h"

namespace sonotrace {

// Row-major 2-D array; row = depth index, column = lateral index.
class Image2D {
 public:
  Image2D() = default;
  Image2D(int nx, int nz, double fill = 0.0)
      : nx_(nx), nz_(nz), values_(static_cast<size_t>(nx) * nz, fill) {}

  int nx() const { return nx_; }
  int nz() const { return nz_; }
  double& at(int iz, int ix) { return values_[static_cast<size_t>(iz) * nx_ + ix]; }
  double at(int iz, int ix) const {
    return values_[static_cast<size_t>(iz) * nx_ + ix];
  }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }

 private:
  int nx_ = 0;
  int nz_ = 0;
  std::vector<double> values_;
};

struct Pulse {
  double fc = 0.0;
  double cycles = 0.0;
  double sigma = 0.0;  // s^2, envelope exp(-t^2 / sigma)
  double fs = 0.0;
  std::vector<double> kernel;  // odd length, t = 0 at the middle sample

  int center() const { return static_cast<int>(kernel.size() / 2); }
};

// s(t) = sin(2 pi fc t) exp(-t^2 / sigma) with the envelope at half amplitude
// at t = +-cycles / (2 fc). Support extends until the envelope reaches 1e-3.
// Throws std::invalid_argument if fs <= 2 fc or cycles < 1.
Pulse pulse_kernel(double fc, double cycles, double fs);

// Trace length that holds every echo up to `max_path_length` of travel each
// way plus the pulse tail.
int default_num_samples(double max_path_length, double speed_of_sound,
                        double fs, const Pulse& pulse);

// Per-trace linear convolution, output aligned to the kernel center.
ChannelData convolve_channels(const ChannelData& channel, const Pulse& pulse,
                              int threads = 0);
ChannelData convolve_channels_serial(const ChannelData& channel,
                                     const Pulse& pulse);

struct BeamformGrid {
  double x_min = -0.02;
  double x_max = 0.02;
  double z_min = 0.01;
  double z_max = 0.06;
  double pixel_pitch = 5e-5;

  int nx() const;
  int nz() const;
  double x(int ix) const { return x_min + ix * pixel_pitch; }
  double z(int iz) const { return z_min + iz * pixel_pitch; }
};

void validate(const BeamformGrid& grid);

enum class Apodization { kNone, kHann };

struct BeamformOptions {
  double f_number = 0.0;  // 0 disables aperture gating
  Apodization apodization = Apodization::kNone;
};

struct BeamformResult {
  Image2D image;
  int64_t out_of_range_pixels = 0;
};

// Pixel position in world coordinates: spec.center + x lateral + z axis.
Vec3 pixel_position(const TransducerSpec& spec, double x, double z);

// Plane-wave delay-and-sum, coherently compounded over events. Pixels that
// need samples outside the recorded traces are zero and counted.
BeamformResult das_beamform(const ChannelData& rf, const TransducerSpec& spec,
                            const PlaneWaveScheme& scheme,
                            const BeamformGrid& grid, double speed_of_sound,
                            const BeamformOptions& options = {},
                            int threads = 0);
BeamformResult das_beamform_serial(const ChannelData& rf,
                                   const TransducerSpec& spec,
                                   const PlaneWaveScheme& scheme,
                                   const BeamformGrid& grid,
                                   double speed_of_sound,
                                   const BeamformOptions& options = {});

// Analytic-signal magnitude of each depth column.
Image2D envelope(const Image2D& beamformed, int threads = 0);

struct BModeImage {
  Image2D values_db;  // all in [-dynamic_range_db, 0]
  double dynamic_range_db = 90.0;
  BeamformGrid grid;
};

// 20 log10(env / max env) clipped to [-dynamic_range_db, 0]. Throws
// std::invalid_argument for an all-zero envelope.
BModeImage log_compress(const Image2D& env, double dynamic_range_db,
                        const BeamformGrid& grid = {});

// 8-bit binary graymap (P5), top row = shallowest depth.
void export_image(const BModeImage& img, const std::filesystem::path& path);

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;
};

GrayImage read_pgm(const std::filesystem::path& path);

// Gray level of a dB value: round-half-away-from-zero of 255 (v + DR) / DR.
uint8_t gray_level(double value_db, double dynamic_range_db);

}  // namespace sonotrace

#endif  // SONOTRACE_DSP_H_
