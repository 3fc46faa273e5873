// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "easr/core.hpp"
#include "easr/rng.hpp"

namespace easr {

enum class BoundaryMode { EqualWidth, RandomCuts };

// Partition of [0, T) into s non-empty temporal segments.
struct SegmentationScheme {
  int segment_count = 0;
  BoundaryMode mode = BoundaryMode::EqualWidth;
  std::vector<int> boundaries;  // s+1 cut indices, 0 = b_0 < ... < b_s = T
};

// equal_width: b_k = floor(k*T/s). random_cuts: s-1 distinct interior cuts
// drawn uniformly from {1..T-1}, sorted.
SegmentationScheme make_scheme(int sample_count, int segment_count, BoundaryMode mode,
                               Rng& rng);

// Each synthetic trial copies segment k verbatim from a uniformly chosen donor
// (with replacement, independent per segment), preserving temporal order.
std::vector<TrialMatrix> reconstruct(const std::vector<TrialMatrix>& class_trials,
                                     const SegmentationScheme& scheme, int n_synthetic,
                                     Rng& rng);

// Originals followed by `multiplier` recombined trials per original, built per
// class from the batch's same-class members under one fresh scheme per call.
// Class histogram scales by (1 + multiplier).
std::vector<LabeledTrial> augment_batch(const std::vector<LabeledTrial>& batch,
                                        int segment_count, Rng& rng, int multiplier = 1,
                                        BoundaryMode mode = BoundaryMode::EqualWidth);

}  // namespace easr
