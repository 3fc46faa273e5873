// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "easr/core.hpp"

namespace easr {

struct PreprocessConfig {
  double band_low_hz = 4.0;
  double band_high_hz = 38.0;
  int filter_order = 4;         // total pole count of the band-pass; even
  double ems_factor_new = 1e-3; // weight of the newest sample in the EMS recursion
  double ems_eps = 1e-4;        // lower clamp on the running standard deviation
  bool rescale_to_microvolts = true;

  // 0 < low < high < fs/2, even positive order.
  void validate(double sampling_rate_hz) const;
};

// One second-order section, direct form II transposed, a0 normalized to 1.
struct Biquad {
  double b0 = 0, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;
};

// Butterworth band-pass with `order` poles (order/2 per edge), bilinear
// transform with prewarped edges, unit gain at the geometric center frequency.
std::vector<Biquad> butterworth_bandpass(int order, double low_hz, double high_hz,
                                         double sampling_rate_hz);

// Zero-phase filtering: odd-reflective padding of 3*order samples, steady-state
// section initialization, forward pass then reversed pass.
void filtfilt(const std::vector<Biquad>& sos,
              Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> x);

// V -> uV: every sample multiplied by 1e6.
TrialSet rescale_v_to_uv(const TrialSet& set);

// Per-channel zero-phase Butterworth band-pass.
TrialSet bandpass(const TrialSet& set, const PreprocessConfig& cfg);

// Exponential moving standardization, per channel, left to right:
//   m_t = f*x_t + (1-f)*m_{t-1}   (m_0 = x_0)
//   v_t = f*(x_t - m_t)^2 + (1-f)*v_{t-1}   (v_0 = 0)
//   x'_t = (x_t - m_t) / max(sqrt(v_t), eps)
TrialSet exponential_moving_standardize(const TrialSet& set, const PreprocessConfig& cfg);

// Fixed chain: rescale -> bandpass -> standardize. Sets the processed flag;
// rejects sets already carrying it.
TrialSet preprocess(const TrialSet& set, const PreprocessConfig& cfg);

}  // namespace easr
