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

#ifndef SONOTRACE_RANDOM_H_
#define SONOTRACE_RANDOM_H_

#include <cstdint>

namespace sonotrace {

// PCG32 (O'Neill 2014). Cheap to construct, so every primary ray gets its own
// stream keyed by (seed, ray index); results are then independent of how rays
// are split across workers.
class RandomStream {
 public:
  using result_type = uint32_t;

  explicit RandomStream(uint64_t seed, uint64_t stream = 0) {
    inc_ = (stream << 1u) | 1u;
    state_ = 0;
    next_u32();
    state_ += seed;
    next_u32();
  }

  uint32_t next_u32() {
    const uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31u));
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    const uint64_t hi = next_u32();
    const uint64_t lo = next_u32();
    return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Lemire's multiply-shift; the bias is below
  // 2^-32 for the element counts used here.
  uint32_t uniform_index(uint32_t n) {
    return static_cast<uint32_t>((static_cast<uint64_t>(next_u32()) * n) >> 32);
  }

  // UniformRandomBitGenerator interface for <random> distributions.
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }
  result_type operator()() { return next_u32(); }

 private:
  uint64_t state_;
  uint64_t inc_;
};

}  // namespace sonotrace

#endif  // SONOTRACE_RANDOM_H_
