// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/augment.hpp"

#include <map>
#include <numeric>
#include <string>

namespace easr {

SegmentationScheme make_scheme(int sample_count, int segment_count, BoundaryMode mode,
                               Rng& rng) {
  if (segment_count <= 0 || segment_count > sample_count) {
    fail(ErrorCode::InvalidSegmentation,
         "segment_count " + std::to_string(segment_count) + " invalid for T = " +
             std::to_string(sample_count));
  }
  SegmentationScheme scheme;
  scheme.segment_count = segment_count;
  scheme.mode = mode;
  scheme.boundaries.resize(segment_count + 1);

  if (mode == BoundaryMode::EqualWidth) {
    for (int k = 0; k <= segment_count; ++k) {
      scheme.boundaries[k] =
          static_cast<int>((static_cast<int64_t>(k) * sample_count) / segment_count);
    }
  } else {
    // s-1 distinct interior cuts via partial Fisher-Yates over {1..T-1}
    std::vector<int> candidates(sample_count - 1);
    std::iota(candidates.begin(), candidates.end(), 1);
    const int n_cuts = segment_count - 1;
    for (int i = 0; i < n_cuts; ++i) {
      const int j = i + static_cast<int>(rng.uniform_int(candidates.size() - i));
      std::swap(candidates[i], candidates[j]);
    }
    std::vector<int> cuts(candidates.begin(), candidates.begin() + n_cuts);
    std::sort(cuts.begin(), cuts.end());
    scheme.boundaries[0] = 0;
    for (int k = 0; k < n_cuts; ++k) scheme.boundaries[k + 1] = cuts[k];
    scheme.boundaries[segment_count] = sample_count;
  }
  return scheme;
}

std::vector<TrialMatrix> reconstruct(const std::vector<TrialMatrix>& class_trials,
                                     const SegmentationScheme& scheme, int n_synthetic,
                                     Rng& rng) {
  if (class_trials.empty()) {
    fail(ErrorCode::EmptyClass, "reconstruct requires at least one source trial");
  }
  const int t = class_trials.front().sample_count();
  if (scheme.boundaries.empty() || scheme.boundaries.back() != t) {
    fail(ErrorCode::InvalidSegmentation, "scheme does not partition the trial length");
  }
  for (const TrialMatrix& trial : class_trials) {
    if (trial.sample_count() != t) {
      fail(ErrorCode::DimensionMismatch, "source trials must share sample count");
    }
  }

  std::vector<TrialMatrix> out;
  out.reserve(n_synthetic);
  const int c = class_trials.front().channel_count();
  for (int i = 0; i < n_synthetic; ++i) {
    Matrix synth(c, t);
    for (int k = 0; k < scheme.segment_count; ++k) {
      const int begin = scheme.boundaries[k];
      const int width = scheme.boundaries[k + 1] - begin;
      const auto donor = static_cast<size_t>(rng.uniform_int(class_trials.size()));
      synth.middleCols(begin, width) = class_trials[donor].data.middleCols(begin, width);
    }
    out.emplace_back(std::move(synth));
  }
  return out;
}

std::vector<LabeledTrial> augment_batch(const std::vector<LabeledTrial>& batch,
                                        int segment_count, Rng& rng, int multiplier,
                                        BoundaryMode mode) {
  if (batch.empty()) {
    fail(ErrorCode::EmptyClass, "augment_batch requires a non-empty batch");
  }
  const int t = batch.front().trial.sample_count();
  const SegmentationScheme scheme = make_scheme(t, segment_count, mode, rng);

  std::map<int, std::vector<TrialMatrix>> by_class;
  for (const LabeledTrial& lt : batch) by_class[lt.label].push_back(lt.trial);

  std::vector<LabeledTrial> out = batch;
  out.reserve(batch.size() * (1 + static_cast<size_t>(multiplier)));
  for (int m = 0; m < multiplier; ++m) {
    for (const LabeledTrial& original : batch) {
      std::vector<TrialMatrix> synth =
          reconstruct(by_class.at(original.label), scheme, 1, rng);
      LabeledTrial lt;
      lt.trial = std::move(synth.front());
      lt.label = original.label;
      lt.subject_id = original.subject_id;
      lt.run_id = original.run_id;
      out.push_back(std::move(lt));
    }
  }
  return out;
}

}  // namespace easr
