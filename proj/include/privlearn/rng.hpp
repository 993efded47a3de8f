// Copyright 2026 The privlearn Authors
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

#ifndef PRIVLEARN_RNG_HPP_
#define PRIVLEARN_RNG_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace privlearn {

// Deterministic pseudo-randomness for experiments. xoshiro256++ with SplitMix64
// seeding; sampling primitives are implemented here rather than via
// <random> distributions so that identical seeds give identical streams on
// every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = SplitMix64(x);
  }

  // Independent stream derived from a root seed and a counter. Streams with
  // distinct ids are statistically independent for experiment purposes.
  static Rng Stream(std::uint64_t root_seed, std::uint64_t stream_id) {
    return Rng(root_seed ^ SplitMix64Once(0x9E3779B97F4A7C15ULL * (stream_id + 1)));
  }

  std::uint64_t Next() {
    const std::uint64_t result = Rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = Rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0,1), 53-bit mantissa.
  double Uniform01() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0,1); never returns an endpoint, so it is
  // safe to feed through logarithms.
  double UniformOpen01() {
    return (static_cast<double>(Next() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool Bernoulli(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("Bernoulli: p outside [0,1]");
    return Uniform01() < p;
  }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t Below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Below: n must be positive");
    const std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      const std::uint64_t r = Next();
      if (r >= threshold) return r % n;
    }
  }

  // Laplace(scale) by inverse CDF from a single uniform draw.
  double Laplace(double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("Laplace: scale must be positive");
    const double u = UniformOpen01() - 0.5;
    // log1p keeps precision near u = +-1/2.
    return u < 0.0 ? scale * std::log1p(2.0 * u) : -scale * std::log1p(-2.0 * u);
  }

 private:
  static std::uint64_t SplitMix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t SplitMix64Once(std::uint64_t x) { return SplitMix64(x); }
  static std::uint64_t Rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace privlearn

#endif  // PRIVLEARN_RNG_HPP_
