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

// Binary dumps. All integers and reals are little-endian.
//
//   URRF: "URRF" u32 version=1 u32 n_events u32 n_elements u32 n_samples
//         f64 fs, then f32 samples in [event][element][sample] order.
//   URBF: "URBF" u32 version=1 u32 nx u32 nz f64 pitch, then f32 values
//         row-major (row = depth).

#ifndef SONOTRACE_RF_IO_H_
#define SONOTRACE_RF_IO_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "sonotrace/dsp.h"
#include "sonotrace/tracer.h"

namespace sonotrace {

inline constexpr uint32_t kDumpVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_urrf(const ChannelData& channel, const std::filesystem::path& path);
// Values come back as the stored 32-bit reals widened to double.
ChannelData read_urrf(const std::filesystem::path& path);

void write_urbf(const Image2D& image, double pitch,
                const std::filesystem::path& path);
Image2D read_urbf(const std::filesystem::path& path, double* pitch = nullptr);

}  // namespace sonotrace

#endif  // SONOTRACE_RF_IO_H_
