// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/align.hpp"

#include <map>
#include <string>

namespace easr {

AlignmentReference compute_reference(const std::vector<TrialMatrix>& trials,
                                     int subject_id, int run_id) {
  if (trials.empty()) {
    fail(ErrorCode::EmptyRun, "no trials for subject " + std::to_string(subject_id) +
                                  " run " + std::to_string(run_id));
  }
  const int c = trials.front().channel_count();
  Matrix sum = Matrix::Zero(c, c);
  for (const TrialMatrix& trial : trials) {
    if (trial.channel_count() != c) {
      fail(ErrorCode::DimensionMismatch, "trials in a run must share channel count");
    }
    sum += trial_covariance(trial).data;
  }
  AlignmentReference ref;
  ref.mean_cov = SpdMatrix(sum / static_cast<double>(trials.size()));
  ref.whitener = inv_sqrtm(ref.mean_cov);
  ref.subject_id = subject_id;
  ref.run_id = run_id;
  ref.n_trials_used = static_cast<int>(trials.size());
  return ref;
}

TrialMatrix apply_alignment(const AlignmentReference& ref, const TrialMatrix& trial) {
  if (trial.channel_count() != ref.dim()) {
    fail(ErrorCode::DimensionMismatch,
         "trial has " + std::to_string(trial.channel_count()) + " channels, reference is " +
             std::to_string(ref.dim()) + "-dimensional");
  }
  return TrialMatrix(ref.whitener.data * trial.data);
}

std::pair<TrialSet, std::vector<AlignmentReference>> align_dataset(const TrialSet& set) {
  std::map<std::pair<int, int>, std::vector<const TrialMatrix*>> groups;
  for (const LabeledTrial& lt : set.trials) {
    groups[{lt.subject_id, lt.run_id}].push_back(&lt.trial);
  }

  std::map<std::pair<int, int>, AlignmentReference> refs;
  for (const auto& [key, members] : groups) {
    std::vector<TrialMatrix> copies;
    copies.reserve(members.size());
    for (const TrialMatrix* t : members) copies.push_back(*t);
    try {
      refs[key] = compute_reference(copies, key.first, key.second);
    } catch (const Error& e) {
      fail(e.code(), "group (subject " + std::to_string(key.first) + ", run " +
                         std::to_string(key.second) + "): " + e.what());
    }
  }

  TrialSet out = set;
  for (LabeledTrial& lt : out.trials) {
    const AlignmentReference& ref = refs.at({lt.subject_id, lt.run_id});
    lt.trial = apply_alignment(ref, lt.trial);
  }
  out.aligned = true;

  std::vector<AlignmentReference> ref_list;
  ref_list.reserve(refs.size());
  for (auto& [key, ref] : refs) ref_list.push_back(std::move(ref));
  return {std::move(out), std::move(ref_list)};
}

AlignmentReference compute_target_reference(const std::vector<TrialMatrix>& calibration_trials,
                                            int subject_id, int run_id) {
  AlignmentReference ref = compute_reference(calibration_trials, subject_id, run_id);
  ref.target_calibrated = true;
  return ref;
}

}  // namespace easr
