// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "easr/rng.hpp"

namespace easr {

// Two accuracy lists paired one-to-one by unit key.
struct PairedSample {
  std::vector<double> condition_a;
  std::vector<double> condition_b;
  std::vector<std::string> keys;  // optional; if set, sizes must match

  void validate() const;
  std::vector<double> differences() const;  // a - b
};

// One-tailed paired permutation test, alternative "a > b". Statistic is the
// mean paired difference; the null distribution is built by sign-flipping the
// differences: exhaustive 2^n enumeration when n <= exhaustive_threshold,
// otherwise Monte Carlo with the identity flip included, so p >= 1/(n_perm+1).
double paired_permutation_test(const PairedSample& sample, int n_permutations, Rng& rng,
                               int exhaustive_threshold = 20);

// Standard normal CDF via erfc.
double normal_cdf(double x);

// Inverse standard normal CDF: Acklam's rational approximation polished with
// one Halley step; absolute error well below 1e-9 over [1e-12, 1-1e-12].
double normal_inverse_cdf(double q);

// Unweighted Stouffer combination: z_i = Phi^-1(1 - p_i), Z = sum(z)/sqrt(k),
// returns 1 - Phi(Z). Inputs are clamped to [1e-15, 1 - 1e-15] with a warning
// on stderr.
double stouffer_combine(const std::vector<double>& p_values);

}  // namespace easr
