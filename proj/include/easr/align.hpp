// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "easr/core.hpp"

namespace easr {

// Per-run whitening reference: R_bar and R_bar^(-1/2).
struct AlignmentReference {
  SpdMatrix mean_cov;
  SpdMatrix whitener;
  int subject_id = 0;
  int run_id = 0;
  int n_trials_used = 0;
  bool target_calibrated = false;

  int dim() const { return mean_cov.dim(); }
};

// Arithmetic mean of trial Gram matrices over the run, whitener = inv_sqrtm of it.
AlignmentReference compute_reference(const std::vector<TrialMatrix>& trials,
                                     int subject_id, int run_id);

// whitener * trial.
TrialMatrix apply_alignment(const AlignmentReference& ref, const TrialMatrix& trial);

// Aligns every (subject, run) group with its own reference; trial order,
// labels and metadata unchanged. References returned in ascending
// (subject, run) order.
std::pair<TrialSet, std::vector<AlignmentReference>> align_dataset(const TrialSet& set);

// Same contract as compute_reference, flagged as target-calibrated. The caller
// is responsible for feeding only calibration-split trials.
AlignmentReference compute_target_reference(const std::vector<TrialMatrix>& calibration_trials,
                                            int subject_id, int run_id);

}  // namespace easr
