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

#include "sonotrace/rf_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace sonotrace {

namespace {

static_assert(std::endian::native == std::endian::little,
              "dump writers assume a little-endian host");

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
  }
  template <typename T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put_floats(const std::vector<double>& values) {
    std::vector<float> tmp(values.begin(), values.end());
    out_.write(reinterpret_cast<const char*>(tmp.data()),
               static_cast<std::streamsize>(tmp.size() * sizeof(float)));
  }
  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("failed writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open " + path.string());
  }
  template <typename T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw FormatError("truncated header in " + path_.string());
    return v;
  }
  void expect_magic(const char (&magic)[5]) {
    char buf[4];
    in_.read(buf, 4);
    if (!in_ || std::memcmp(buf, magic, 4) != 0) {
      throw FormatError(path_.string() + ": bad magic, expected " + magic);
    }
    if (const auto version = get<uint32_t>(); version != kDumpVersion) {
      throw FormatError(path_.string() + ": unsupported version " +
                        std::to_string(version));
    }
  }
  void get_floats(std::vector<double>& out) {
    std::vector<float> tmp(out.size());
    in_.read(reinterpret_cast<char*>(tmp.data()),
             static_cast<std::streamsize>(tmp.size() * sizeof(float)));
    if (!in_) throw FormatError("truncated data in " + path_.string());
    std::copy(tmp.begin(), tmp.end(), out.begin());
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace

void write_urrf(const ChannelData& channel, const std::filesystem::path& path) {
  Writer w(path);
  w.put<char>('U');
  w.put<char>('R');
  w.put<char>('R');
  w.put<char>('F');
  w.put<uint32_t>(kDumpVersion);
  w.put<uint32_t>(static_cast<uint32_t>(channel.num_events()));
  w.put<uint32_t>(static_cast<uint32_t>(channel.num_elements()));
  w.put<uint32_t>(static_cast<uint32_t>(channel.num_samples()));
  w.put<double>(channel.fs());
  w.put_floats(channel.data());
  w.finish();
}

ChannelData read_urrf(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic("URRF");
  const auto events = r.get<uint32_t>();
  const auto elements = r.get<uint32_t>();
  const auto samples = r.get<uint32_t>();
  const auto fs = r.get<double>();
  ChannelData channel(static_cast<int>(events), static_cast<int>(elements),
                      static_cast<int>(samples), fs);
  r.get_floats(channel.data());
  return channel;
}

void write_urbf(const Image2D& image, double pitch,
                const std::filesystem::path& path) {
  Writer w(path);
  w.put<char>('U');
  w.put<char>('R');
  w.put<char>('B');
  w.put<char>('F');
  w.put<uint32_t>(kDumpVersion);
  w.put<uint32_t>(static_cast<uint32_t>(image.nx()));
  w.put<uint32_t>(static_cast<uint32_t>(image.nz()));
  w.put<double>(pitch);
  w.put_floats(image.data());
  w.finish();
}

Image2D read_urbf(const std::filesystem::path& path, double* pitch) {
  Reader r(path);
  r.expect_magic("URBF");
  const auto nx = r.get<uint32_t>();
  const auto nz = r.get<uint32_t>();
  const auto p = r.get<double>();
  if (pitch) *pitch = p;
  Image2D image(static_cast<int>(nx), static_cast<int>(nz));
  r.get_floats(image.data());
  return image;
}

}  // namespace sonotrace
