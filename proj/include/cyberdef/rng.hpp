// Copyright 2026 The cyberdef-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "cyberdef/common.hpp"

namespace cyberdef {

// splitmix64 finalizer; used only for seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for (parent, index). Episode seeds, policy seeds and named
// streams all go through this one function.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(parent ^ splitmix64(index));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::string_view stream_name) {
  return derive_seed(parent, fnv1a64(stream_name));
}

// A seeded mt19937_64 stream. The standard distributions are not specified
// bit-for-bit across library implementations, so sampling helpers here are
// written directly against the raw 64-bit output. The state is fully
// described by (seed, draws), which is what gets serialized.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t next() {
    ++draws_;
    return engine_();
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // One Bernoulli trial. Always consumes exactly one draw, including for
  // p = 0 and p = 1, so stream positions do not depend on the probabilities.
  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return draws_; }

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.seed_ == b.seed_ && a.draws_ == b.draws_;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

}  // namespace cyberdef
