// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace easr {

// SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
// generators", 2014). State advances by the golden-gamma Weyl constant
// 0x9e3779b97f4a7c15; each output is a finalizer hash of the state, so the
// generator is equivalent to a counter-based construction out(i) = mix(seed +
// i*gamma) and streams can be derived by hashing tag sequences.
//
// std:: engines/distributions are deliberately avoided: the C++ standard pins
// engine algorithms but not distribution algorithms, and every dataset,
// shuffle and augmentation draw in this project must be reproducible from the
// recorded seeds alone.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n) via Lemire's multiply-shift with rejection.
  uint64_t uniform_int(uint64_t n);

  // Standard normal via Box-Muller; each pair of uniforms yields two values,
  // the second is cached.
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Derives an independent stream seed from a base seed and a tag path, e.g.
// derive_seed(seed, {kTagShuffle, epoch}).
uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> tags);

}  // namespace easr
