// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "easr/augment.hpp"
#include "easr/core.hpp"
#include "easr/model.hpp"
#include "easr/rng.hpp"

namespace easr {

enum class Paradigm { Individual, Shared, SharedFinetune };
enum class Transform { None, Ea, Sr, EaSr };
enum class ModelKind { Shallow, Linear };
enum class SplitMode { BySession, ByFraction, BySubjectFolds };

const char* paradigm_name(Paradigm p);
const char* transform_name(Transform t);
const char* model_kind_name(ModelKind m);
const char* split_mode_name(SplitMode m);
Paradigm paradigm_from_name(const std::string& s);
Transform transform_from_name(const std::string& s);
ModelKind model_kind_from_name(const std::string& s);
SplitMode split_mode_from_name(const std::string& s);

struct SplitSpec {
  SplitMode mode = SplitMode::ByFraction;
  double train_fraction = 0.70;
  double valid_fraction = 0.15;
  double test_fraction = 0.15;
  int fold_count = 5;

  void validate() const;  // fractions sum to 1 within 1e-9
};

// One paradigm x transform condition over one dataset.
struct ExperimentPlan {
  Paradigm paradigm = Paradigm::Shared;
  Transform transform = Transform::None;
  std::vector<ModelKind> models = {ModelKind::Shallow, ModelKind::Linear};
  std::string dataset_ref;
  SplitSpec split;
  TrainConfig train_config;
  ModelConfig model_config;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  double calibration_fraction = 1.0;  // share of the fine-tune portion used for EA
  int sr_segments = 12;
  BoundaryMode sr_boundary_mode = BoundaryMode::EqualWidth;
  int sr_multiplier = 1;

  void validate() const;
};

struct ResultRow {
  std::string paradigm;
  std::string transform;
  std::string model;
  std::string unit;  // "s<subject-id>"
  uint64_t seed = 0;
  double accuracy = 0.0;  // NaN when status != ok
  std::string status = "ok";
};

struct ResultTable {
  std::vector<ResultRow> rows;

  void sort_rows();
};

// Reviewer-facing record sufficient to re-execute a run.
struct RunMetadata {
  std::string library_version;
  std::string dataset_hash;
  std::string plan_json;                // echo of the resolved plan
  std::vector<uint64_t> seeds;
  std::vector<std::string> stage_log;   // ordered pipeline stages per row group
  double wall_seconds = 0.0;
};

// Stratified-by-class shuffled split at the spec fractions (by_fraction), or
// whole sessions (by_session: 2 runs -> train/test, 3 runs -> train/valid/test).
// Expects a single subject's data.
std::tuple<TrialSet, TrialSet, TrialSet> split_individual(const TrialSet& set,
                                                          const SplitSpec& spec, Rng& rng);

struct SubjectFold {
  std::vector<int> train_subjects;
  std::vector<int> test_subjects;
};

// Subjects partitioned into fold_count groups (sizes differ by <= 1); fold k
// tests on group k and trains on the rest.
std::vector<SubjectFold> split_shared(const std::vector<int>& subject_ids, int fold_count,
                                      Rng& rng);

// Deterministic target-subject split: session mode maps sessions to
// finetune/valid/test; fraction mode halves the trial list in stored order
// (first half fine-tune, second half test, no validation carve-out).
std::tuple<TrialSet, TrialSet, TrialSet> split_finetune(const TrialSet& target_set,
                                                        const SplitSpec& spec);

// Executes one plan: offline EA where requested (training subjects per-run,
// target subjects from their calibration split only), online S&R through the
// batch augmenter, training/evaluation per paradigm. One row per
// (subject, seed, model); failures are recorded as failed rows, not dropped.
ResultTable run_experiment(const ExperimentPlan& plan, const TrialSet& data,
                           RunMetadata* metadata = nullptr);

struct SummaryRow {
  std::string paradigm;
  std::string model;
  std::string transform;
  int n_units = 0;
  double mean_pct = 0.0;  // accuracy in percent
  double std_pct = 0.0;   // population std
  bool has_delta = false;
  double delta_mean_pts = 0.0;  // paired delta vs baseline, percentage points
  double delta_std_pts = 0.0;
};

// Per (paradigm, model, transform): mean +- std and the paired delta against
// the baseline transform over matched (unit, seed) pairs.
std::vector<SummaryRow> summarize(const ResultTable& table,
                                  const std::string& baseline_transform = "none");

// Helpers shared with the CLI and tests.
std::vector<int> subject_ids(const TrialSet& set);
TrialSet filter_subject(const TrialSet& set, int subject_id);
TrialSet filter_subjects(const TrialSet& set, const std::vector<int>& ids);

}  // namespace easr
