// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/rng.hpp"

#include <cmath>

namespace easr {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

uint64_t Rng::uniform_int(uint64_t n) {
  if (n == 0) return 0;
  __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
  auto lo = static_cast<uint64_t>(m);
  if (lo < n) {
    uint64_t threshold = (0 - n) % n;
    while (lo < threshold) {
      m = static_cast<__uint128_t>(next_u64()) * n;
      lo = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  have_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> tags) {
  uint64_t h = mix64(base + 0x9e3779b97f4a7c15ULL);
  for (uint64_t t : tags) {
    h = mix64(h ^ mix64(t + 0x9e3779b97f4a7c15ULL));
  }
  return h;
}

}  // namespace easr
