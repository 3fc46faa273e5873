// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "easr/core.hpp"

namespace easr {

// Multi-subject synthetic EEG. Class k carries a weak narrowband oscillation at
// class_frequencies_hz[k] along a latent spatial pattern; strong
// class-independent background rhythms plus pink noise fill the remaining
// latent dimensions. All subject variability enters through an invertible
// per-subject mixing A_s = gain * R_small * H_spd with cond(A_s) <=
// mixing_condition_bound, so whitening can remove it; sessions perturb A_s by a
// small extra rotation.
struct GeneratorConfig {
  int n_subjects = 8;
  int n_sessions = 2;
  int trials_per_class_per_session = 50;
  int channel_count = 8;   // C
  int sample_count = 256;  // T
  double sampling_rate_hz = 128.0;
  int class_count = 2;  // K
  std::vector<double> class_frequencies_hz = {10.0, 22.0};
  double snr = 1.5;  // source-to-noise amplitude ratio
  double mixing_condition_bound = 10.0;
  uint64_t seed = 42;

  void validate() const;
};

struct SubjectGroundTruth {
  int subject_id = 0;
  double gain = 1.0;
  std::vector<Matrix> session_mixing;  // one invertible C x C matrix per session
};

struct GroundTruth {
  Matrix latent_basis;  // orthonormal; col k < K = class pattern, next cols = rhythms
  std::vector<double> class_frequencies_hz;
  std::vector<double> interference_frequencies_hz;
  double class_oscillation_variance = 0.0;
  double interference_total_variance = 0.0;
  std::vector<SubjectGroundTruth> subjects;
};

// Deterministic in the config (SplitMix64 streams, fixed draw order). Trials
// are ordered subject-major, then session, then class, then repetition; labels
// balanced per (subject, session).
std::pair<TrialSet, GroundTruth> generate(const GeneratorConfig& config);

}  // namespace easr
