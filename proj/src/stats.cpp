// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/stats.hpp"

#include <cmath>
#include <iostream>

#include "easr/error.hpp"

namespace easr {

void PairedSample::validate() const {
  if (condition_a.size() != condition_b.size()) {
    fail(ErrorCode::PairingError,
         "condition lengths differ: " + std::to_string(condition_a.size()) + " vs " +
             std::to_string(condition_b.size()));
  }
  if (!keys.empty() && keys.size() != condition_a.size()) {
    fail(ErrorCode::PairingError, "pairing keys do not align with the samples");
  }
  if (condition_a.size() < 2) {
    fail(ErrorCode::PairingError, "need at least 2 pairs");
  }
}

std::vector<double> PairedSample::differences() const {
  std::vector<double> d(condition_a.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = condition_a[i] - condition_b[i];
  return d;
}

double paired_permutation_test(const PairedSample& sample, int n_permutations, Rng& rng,
                               int exhaustive_threshold) {
  sample.validate();
  const std::vector<double> d = sample.differences();
  const int n = static_cast<int>(d.size());

  double observed = 0.0;
  for (double v : d) observed += v;
  // sums compare like means; skip the 1/n

  if (n <= exhaustive_threshold) {
    const uint64_t total = uint64_t(1) << n;
    uint64_t count = 0;
    for (uint64_t mask = 0; mask < total; ++mask) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        s += (mask >> i) & 1 ? -d[size_t(i)] : d[size_t(i)];
      }
      if (s >= observed) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(total);
  }

  uint64_t count = 1;  // identity flip
  for (int perm = 0; perm < n_permutations; ++perm) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += (rng.next_u64() & 1) ? -d[size_t(i)] : d[size_t(i)];
    }
    if (s >= observed) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(n_permutations + 1);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_inverse_cdf(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    fail(ErrorCode::DomainError, "quantile must lie strictly in (0, 1)");
  }

  // Acklam's coefficients
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};

  const double p_low = 0.02425;
  double x;
  if (q < p_low) {
    const double r = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((dd[0] * r + dd[1]) * r + dd[2]) * r + dd[3]) * r + 1.0);
  } else if (q <= 1.0 - p_low) {
    const double r = q - 0.5;
    const double s = r * r;
    x = (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * r /
        (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
  } else {
    const double r = std::sqrt(-2.0 * std::log(1.0 - q));
    x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((dd[0] * r + dd[1]) * r + dd[2]) * r + dd[3]) * r + 1.0);
  }

  // One Halley step against the erfc-based CDF.
  static const double inv_sqrt_2pi = 0.3989422804014326779399461;
  const double e = normal_cdf(x) - q;
  const double u = e / (inv_sqrt_2pi * std::exp(-0.5 * x * x));
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double stouffer_combine(const std::vector<double>& p_values) {
  if (p_values.empty()) {
    fail(ErrorCode::EmptyInput, "no p-values to combine");
  }
  double z_sum = 0.0;
  for (double p : p_values) {
    double clamped = p;
    if (p < 1e-15 || p > 1.0 - 1e-15) {
      clamped = std::min(std::max(p, 1e-15), 1.0 - 1e-15);
      std::cerr << "warning: p-value " << p << " clamped to " << clamped
                << " for Stouffer combination\n";
    }
    z_sum += normal_inverse_cdf(1.0 - clamped);
  }
  const double z = z_sum / std::sqrt(static_cast<double>(p_values.size()));
  return 1.0 - normal_cdf(z);
}

}  // namespace easr
