// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "easr/align.hpp"

namespace easr {

namespace {

// rng stream tags
constexpr uint64_t kTagSplit = 21;
constexpr uint64_t kTagFolds = 22;
constexpr uint64_t kTagPoolSplit = 23;
constexpr uint64_t kTagModelInit = 24;
constexpr uint64_t kTagTrain = 25;

}  // namespace

const char* paradigm_name(Paradigm p) {
  switch (p) {
    case Paradigm::Individual: return "individual";
    case Paradigm::Shared: return "shared";
    case Paradigm::SharedFinetune: return "shared_finetune";
  }
  return "?";
}

const char* transform_name(Transform t) {
  switch (t) {
    case Transform::None: return "none";
    case Transform::Ea: return "ea";
    case Transform::Sr: return "sr";
    case Transform::EaSr: return "ea_sr";
  }
  return "?";
}

const char* model_kind_name(ModelKind m) {
  switch (m) {
    case ModelKind::Shallow: return "shallow";
    case ModelKind::Linear: return "linear";
  }
  return "?";
}

const char* split_mode_name(SplitMode m) {
  switch (m) {
    case SplitMode::BySession: return "by_session";
    case SplitMode::ByFraction: return "by_fraction";
    case SplitMode::BySubjectFolds: return "by_subject_folds";
  }
  return "?";
}

Paradigm paradigm_from_name(const std::string& s) {
  if (s == "individual") return Paradigm::Individual;
  if (s == "shared") return Paradigm::Shared;
  if (s == "shared_finetune") return Paradigm::SharedFinetune;
  fail(ErrorCode::InvalidPlan, "unknown paradigm '" + s + "'");
}

Transform transform_from_name(const std::string& s) {
  if (s == "none") return Transform::None;
  if (s == "ea") return Transform::Ea;
  if (s == "sr") return Transform::Sr;
  if (s == "ea_sr") return Transform::EaSr;
  fail(ErrorCode::InvalidPlan, "unknown transform '" + s + "'");
}

ModelKind model_kind_from_name(const std::string& s) {
  if (s == "shallow") return ModelKind::Shallow;
  if (s == "linear") return ModelKind::Linear;
  fail(ErrorCode::InvalidPlan, "unknown model '" + s + "'");
}

SplitMode split_mode_from_name(const std::string& s) {
  if (s == "by_session") return SplitMode::BySession;
  if (s == "by_fraction") return SplitMode::ByFraction;
  if (s == "by_subject_folds") return SplitMode::BySubjectFolds;
  fail(ErrorCode::InvalidPlan, "unknown split mode '" + s + "'");
}

void SplitSpec::validate() const {
  const double sum = train_fraction + valid_fraction + test_fraction;
  if (std::abs(sum - 1.0) > 1e-9) {
    fail(ErrorCode::InvalidPlan, "split fractions must sum to 1");
  }
  if (train_fraction <= 0.0 || test_fraction <= 0.0 || valid_fraction < 0.0) {
    fail(ErrorCode::InvalidPlan, "train and test fractions must be positive");
  }
  if (fold_count < 2) fail(ErrorCode::InvalidPlan, "fold_count must be at least 2");
}

void ExperimentPlan::validate() const {
  split.validate();
  train_config.validate();
  if (models.empty()) fail(ErrorCode::InvalidPlan, "plan selects no models");
  if (seeds.empty()) fail(ErrorCode::InvalidPlan, "plan selects no seeds");
  if (!(calibration_fraction > 0.0 && calibration_fraction <= 1.0)) {
    fail(ErrorCode::InvalidPlan, "calibration_fraction must lie in (0, 1]");
  }
  if (sr_segments < 1 || sr_multiplier < 1) {
    fail(ErrorCode::InvalidPlan, "S&R parameters must be positive");
  }
}

void ResultTable::sort_rows() {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.paradigm, a.transform, a.model, a.unit, a.seed) <
           std::tie(b.paradigm, b.transform, b.model, b.unit, b.seed);
  });
}

std::vector<int> subject_ids(const TrialSet& set) {
  std::set<int> ids;
  for (const LabeledTrial& lt : set.trials) ids.insert(lt.subject_id);
  return {ids.begin(), ids.end()};
}

TrialSet filter_subject(const TrialSet& set, int subject_id) {
  return filter_subjects(set, {subject_id});
}

TrialSet filter_subjects(const TrialSet& set, const std::vector<int>& ids) {
  TrialSet out;
  out.class_count = set.class_count;
  out.sampling_rate_hz = set.sampling_rate_hz;
  out.preprocessed = set.preprocessed;
  out.aligned = set.aligned;
  const std::set<int> wanted(ids.begin(), ids.end());
  for (const LabeledTrial& lt : set.trials) {
    if (wanted.count(lt.subject_id)) out.trials.push_back(lt);
  }
  return out;
}

namespace {

TrialSet like(const TrialSet& src) {
  TrialSet out;
  out.class_count = src.class_count;
  out.sampling_rate_hz = src.sampling_rate_hz;
  out.preprocessed = src.preprocessed;
  out.aligned = src.aligned;
  return out;
}

std::vector<int> run_ids_sorted(const TrialSet& set) {
  std::set<int> runs;
  for (const LabeledTrial& lt : set.trials) runs.insert(lt.run_id);
  return {runs.begin(), runs.end()};
}

TrialSet filter_runs(const TrialSet& set, const std::set<int>& runs) {
  TrialSet out = like(set);
  for (const LabeledTrial& lt : set.trials) {
    if (runs.count(lt.run_id)) out.trials.push_back(lt);
  }
  return out;
}

}  // namespace

std::tuple<TrialSet, TrialSet, TrialSet> split_individual(const TrialSet& set,
                                                          const SplitSpec& spec, Rng& rng) {
  spec.validate();
  if (set.trials.empty()) fail(ErrorCode::EmptySplit, "cannot split an empty set");
  if (subject_ids(set).size() != 1) {
    fail(ErrorCode::InvalidPlan, "split_individual expects a single subject's data");
  }

  if (spec.mode == SplitMode::BySession) {
    const std::vector<int> runs = run_ids_sorted(set);
    if (runs.size() < 2) {
      fail(ErrorCode::EmptySplit, "by_session split needs at least 2 sessions");
    }
    if (runs.size() == 2) {
      return {filter_runs(set, {runs[0]}), like(set), filter_runs(set, {runs[1]})};
    }
    std::set<int> rest(runs.begin() + 2, runs.end());
    return {filter_runs(set, {runs[0]}), filter_runs(set, {runs[1]}), filter_runs(set, rest)};
  }
  if (spec.mode != SplitMode::ByFraction) {
    fail(ErrorCode::InvalidPlan, "individual splits support by_fraction or by_session");
  }

  std::map<int, std::vector<size_t>> by_class;
  for (size_t i = 0; i < set.trials.size(); ++i) {
    by_class[set.trials[i].label].push_back(i);
  }

  std::vector<size_t> train_idx, valid_idx, test_idx;
  for (auto& [label, indices] : by_class) {
    rng.shuffle(indices);
    const auto n = static_cast<double>(indices.size());
    const auto n_train = static_cast<size_t>(std::floor(n * spec.train_fraction));
    const auto n_train_valid =
        static_cast<size_t>(std::floor(n * (spec.train_fraction + spec.valid_fraction)));
    const bool want_valid = spec.valid_fraction > 0.0;
    if (n_train == 0 || n_train_valid == indices.size() ||
        (want_valid && n_train_valid == n_train)) {
      fail(ErrorCode::StratificationFailure,
           "class " + std::to_string(label) + " with " +
               std::to_string(indices.size()) + " trials cannot cover every split");
    }
    train_idx.insert(train_idx.end(), indices.begin(), indices.begin() + long(n_train));
    valid_idx.insert(valid_idx.end(), indices.begin() + long(n_train),
                     indices.begin() + long(n_train_valid));
    test_idx.insert(test_idx.end(), indices.begin() + long(n_train_valid), indices.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(valid_idx.begin(), valid_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  TrialSet train = like(set), valid = like(set), test = like(set);
  for (size_t i : train_idx) train.trials.push_back(set.trials[i]);
  for (size_t i : valid_idx) valid.trials.push_back(set.trials[i]);
  for (size_t i : test_idx) test.trials.push_back(set.trials[i]);
  return {std::move(train), std::move(valid), std::move(test)};
}

std::vector<SubjectFold> split_shared(const std::vector<int>& subject_ids_in, int fold_count,
                                      Rng& rng) {
  if (static_cast<int>(subject_ids_in.size()) < fold_count) {
    fail(ErrorCode::InsufficientSubjects,
         std::to_string(subject_ids_in.size()) + " subjects cannot fill " +
             std::to_string(fold_count) + " folds");
  }
  std::vector<int> ids = subject_ids_in;
  std::sort(ids.begin(), ids.end());
  rng.shuffle(ids);

  const int n = static_cast<int>(ids.size());
  const int base = n / fold_count;
  const int remainder = n % fold_count;

  std::vector<SubjectFold> folds(static_cast<size_t>(fold_count));
  int cursor = 0;
  for (int f = 0; f < fold_count; ++f) {
    const int size = base + (f < remainder ? 1 : 0);
    for (int i = 0; i < size; ++i) folds[size_t(f)].test_subjects.push_back(ids[size_t(cursor++)]);
    std::sort(folds[size_t(f)].test_subjects.begin(), folds[size_t(f)].test_subjects.end());
  }
  for (int f = 0; f < fold_count; ++f) {
    for (int id : ids) {
      const auto& test = folds[size_t(f)].test_subjects;
      if (!std::binary_search(test.begin(), test.end(), id)) {
        folds[size_t(f)].train_subjects.push_back(id);
      }
    }
    std::sort(folds[size_t(f)].train_subjects.begin(), folds[size_t(f)].train_subjects.end());
  }
  return folds;
}

std::tuple<TrialSet, TrialSet, TrialSet> split_finetune(const TrialSet& target_set,
                                                        const SplitSpec& spec) {
  if (target_set.trials.empty()) {
    fail(ErrorCode::EmptySplit, "target set is empty");
  }
  if (spec.mode == SplitMode::BySession) {
    const std::vector<int> runs = run_ids_sorted(target_set);
    if (runs.size() < 2) {
      fail(ErrorCode::EmptySplit, "session-mode fine-tune split needs >= 2 sessions");
    }
    if (runs.size() == 2) {
      return {filter_runs(target_set, {runs[0]}), like(target_set),
              filter_runs(target_set, {runs[1]})};
    }
    std::set<int> rest(runs.begin() + 2, runs.end());
    return {filter_runs(target_set, {runs[0]}), filter_runs(target_set, {runs[1]}),
            filter_runs(target_set, rest)};
  }

  // fraction mode: first half fine-tune, second half test, stored order
  const size_t n = target_set.trials.size();
  const size_t half = n / 2;
  if (half == 0) fail(ErrorCode::EmptySplit, "fine-tune portion is empty");
  TrialSet ft = like(target_set), test = like(target_set);
  ft.trials.assign(target_set.trials.begin(), target_set.trials.begin() + long(half));
  test.trials.assign(target_set.trials.begin() + long(half), target_set.trials.end());
  return {std::move(ft), like(target_set), std::move(test)};
}

namespace {

std::unique_ptr<Decoder> make_decoder(ModelKind kind, int channels, int samples, int classes,
                                      const ModelConfig& cfg, uint64_t init_seed) {
  if (kind == ModelKind::Shallow) {
    return std::make_unique<ShallowDecoder>(channels, samples, classes, cfg, init_seed);
  }
  return std::make_unique<LinearDecoder>(channels, samples, classes);
}

Augmenter make_augmenter(const ExperimentPlan& plan) {
  const int segments = plan.sr_segments;
  const int multiplier = plan.sr_multiplier;
  const BoundaryMode mode = plan.sr_boundary_mode;
  return [segments, multiplier, mode](const std::vector<LabeledTrial>& batch, Rng& rng) {
    return augment_batch(batch, segments, rng, multiplier, mode);
  };
}

// Target-subject alignment from the calibration split only (never test trials):
// one pooled reference, applied to every trial of the subject.
TrialSet align_target_subject(const TrialSet& target_sub, const ExperimentPlan& plan,
                              std::vector<std::string>* stage_log) {
  auto [ft_train, ft_valid, test] = split_finetune(target_sub, plan.split);
  const size_t n_cal = std::max<size_t>(
      1, static_cast<size_t>(std::ceil(plan.calibration_fraction *
                                       static_cast<double>(ft_train.trials.size()))));
  std::vector<TrialMatrix> calibration;
  for (size_t i = 0; i < std::min(n_cal, ft_train.trials.size()); ++i) {
    calibration.push_back(ft_train.trials[i].trial);
  }
  const int subject = target_sub.trials.front().subject_id;
  const AlignmentReference ref = compute_target_reference(calibration, subject, -1);
  TrialSet out = target_sub;
  for (LabeledTrial& lt : out.trials) lt.trial = apply_alignment(ref, lt.trial);
  out.aligned = true;
  if (stage_log) {
    stage_log->push_back("align:offline target s" + std::to_string(subject) +
                         " calibration_trials=" + std::to_string(calibration.size()));
  }
  return out;
}

// Stratified (subject, class) train/valid split of the shared training pool;
// the validation share is the spec's valid fraction renormalized over
// train+valid.
std::pair<TrialSet, TrialSet> split_pool(const TrialSet& pool, const SplitSpec& spec,
                                         Rng& rng) {
  const double denom = spec.train_fraction + spec.valid_fraction;
  const double valid_share = denom > 0 ? spec.valid_fraction / denom : 0.0;

  std::map<std::pair<int, int>, std::vector<size_t>> cells;
  for (size_t i = 0; i < pool.trials.size(); ++i) {
    cells[{pool.trials[i].subject_id, pool.trials[i].label}].push_back(i);
  }
  std::vector<size_t> train_idx, valid_idx;
  for (auto& [key, indices] : cells) {
    rng.shuffle(indices);
    auto n_valid = static_cast<size_t>(
        std::floor(valid_share * static_cast<double>(indices.size())));
    if (n_valid == indices.size()) n_valid = indices.size() - 1;
    valid_idx.insert(valid_idx.end(), indices.begin(), indices.begin() + long(n_valid));
    train_idx.insert(train_idx.end(), indices.begin() + long(n_valid), indices.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(valid_idx.begin(), valid_idx.end());
  TrialSet train = like(pool), valid = like(pool);
  for (size_t i : train_idx) train.trials.push_back(pool.trials[i]);
  for (size_t i : valid_idx) valid.trials.push_back(pool.trials[i]);
  return {std::move(train), std::move(valid)};
}

struct RowRecorder {
  ResultTable& table;
  const ExperimentPlan& plan;

  template <typename Fn>
  void record(ModelKind model, const std::string& unit, uint64_t seed, Fn&& fn) {
    ResultRow row;
    row.paradigm = paradigm_name(plan.paradigm);
    row.transform = transform_name(plan.transform);
    row.model = model_kind_name(model);
    row.unit = unit;
    row.seed = seed;
    try {
      row.accuracy = fn();
    } catch (const Error& e) {
      row.accuracy = std::numeric_limits<double>::quiet_NaN();
      row.status = error_code_name(e.code());
    }
    table.rows.push_back(std::move(row));
  }
};

void run_individual(const ExperimentPlan& plan, const TrialSet& data, ResultTable& table,
                    std::vector<std::string>* stage_log) {
  const bool use_ea = plan.transform == Transform::Ea || plan.transform == Transform::EaSr;
  const bool use_sr = plan.transform == Transform::Sr || plan.transform == Transform::EaSr;
  const Augmenter augmenter = use_sr ? make_augmenter(plan) : Augmenter();
  RowRecorder recorder{table, plan};

  for (int subject : subject_ids(data)) {
    TrialSet sub = filter_subject(data, subject);
    if (use_ea) {
      sub = align_dataset(sub).first;
      if (stage_log) {
        stage_log->push_back("align:offline per-run s" + std::to_string(subject));
      }
    }
    for (uint64_t seed : plan.seeds) {
      for (size_t m = 0; m < plan.models.size(); ++m) {
        const ModelKind model = plan.models[m];
        recorder.record(model, "s" + std::to_string(subject), seed, [&]() {
          Rng split_rng(derive_seed(seed, {kTagSplit, static_cast<uint64_t>(subject)}));
          auto [train_set, valid_set, test_set] = split_individual(sub, plan.split, split_rng);
          auto decoder = make_decoder(
              model, sub.channel_count(), sub.sample_count(), sub.class_count,
              plan.model_config,
              derive_seed(seed, {kTagModelInit, static_cast<uint64_t>(subject), m}));
          TrainConfig cfg = plan.train_config;
          cfg.seed = derive_seed(seed, {kTagTrain, static_cast<uint64_t>(subject), m});
          if (use_sr && stage_log) {
            stage_log->push_back("augment:online s&r s" + std::to_string(subject));
          }
          train(*decoder, train_set, valid_set, cfg, augmenter);
          return evaluate(*decoder, test_set).accuracy;
        });
      }
    }
  }
}

void run_shared(const ExperimentPlan& plan, const TrialSet& data, ResultTable& table,
                std::vector<std::string>* stage_log) {
  const bool use_ea = plan.transform == Transform::Ea || plan.transform == Transform::EaSr;
  const bool use_sr = plan.transform == Transform::Sr || plan.transform == Transform::EaSr;
  const bool finetune = plan.paradigm == Paradigm::SharedFinetune;
  const Augmenter augmenter = use_sr ? make_augmenter(plan) : Augmenter();
  RowRecorder recorder{table, plan};

  const std::vector<int> subjects = subject_ids(data);
  if (static_cast<int>(subjects.size()) < 2) {
    fail(ErrorCode::InsufficientSubjects, "shared paradigms need at least 2 subjects");
  }

  // Per-subject material reused across folds/seeds: full-run aligned data for
  // training-pool duty, calibration-aligned data for target duty.
  std::map<int, TrialSet> as_source;
  std::map<int, TrialSet> as_target;
  for (int s : subjects) {
    TrialSet sub = filter_subject(data, s);
    if (use_ea) {
      as_source[s] = align_dataset(sub).first;
      as_target[s] = align_target_subject(sub, plan, stage_log);
      if (stage_log) stage_log->push_back("align:offline per-run s" + std::to_string(s));
    } else {
      as_source[s] = sub;
      as_target[s] = std::move(sub);
    }
  }

  for (uint64_t seed : plan.seeds) {
    // fold assignment derives from the seed alone so every transform and
    // paradigm pairs on identical target sets
    Rng fold_rng(derive_seed(seed, {kTagFolds}));
    const std::vector<SubjectFold> folds =
        split_shared(subjects, plan.split.fold_count, fold_rng);

    for (size_t f = 0; f < folds.size(); ++f) {
      const SubjectFold& fold = folds[f];
      TrialSet pool = like(data);
      for (int s : fold.train_subjects) {
        const TrialSet& src = as_source.at(s);
        pool.trials.insert(pool.trials.end(), src.trials.begin(), src.trials.end());
        pool.aligned = src.aligned;
      }

      for (size_t m = 0; m < plan.models.size(); ++m) {
        const ModelKind model = plan.models[m];
        std::unique_ptr<Decoder> shared_decoder;
        std::string train_failure;
        try {
          Rng pool_rng(derive_seed(seed, {kTagPoolSplit, f}));
          auto [pool_train, pool_valid] = split_pool(pool, plan.split, pool_rng);
          shared_decoder = make_decoder(model, data.channel_count(), data.sample_count(),
                                        data.class_count, plan.model_config,
                                        derive_seed(seed, {kTagModelInit, f, m}));
          TrainConfig cfg = plan.train_config;
          cfg.seed = derive_seed(seed, {kTagTrain, f, m});
          if (use_sr && stage_log) {
            stage_log->push_back("augment:online s&r fold" + std::to_string(f));
          }
          train(*shared_decoder, pool_train, pool_valid, cfg, augmenter);
        } catch (const Error& e) {
          train_failure = error_code_name(e.code());
        }

        for (int target : fold.test_subjects) {
          recorder.record(model, "s" + std::to_string(target), seed, [&]() -> double {
            if (!train_failure.empty()) {
              fail(ErrorCode::InvalidPlan, "shared training failed: " + train_failure);
            }
            const TrialSet& target_data = as_target.at(target);
            auto [ft_train, ft_valid, test_set] = split_finetune(target_data, plan.split);
            if (!finetune) {
              return evaluate(*shared_decoder, test_set).accuracy;
            }
            auto tuned = shared_decoder->clone();
            TrainConfig cfg = plan.train_config;
            cfg.seed = derive_seed(seed, {kTagTrain, f, m, static_cast<uint64_t>(target)});
            fine_tune(*tuned, ft_train, ft_valid, cfg, augmenter);
            return evaluate(*tuned, test_set).accuracy;
          });
        }
      }
    }
  }
}

}  // namespace

ResultTable run_experiment(const ExperimentPlan& plan, const TrialSet& data,
                           RunMetadata* metadata) {
  plan.validate();
  data.validate();
  if (data.trials.empty()) fail(ErrorCode::EmptySplit, "dataset is empty");

  ResultTable table;
  std::vector<std::string>* stage_log = metadata ? &metadata->stage_log : nullptr;
  if (plan.paradigm == Paradigm::Individual) {
    run_individual(plan, data, table, stage_log);
  } else {
    run_shared(plan, data, table, stage_log);
  }
  table.sort_rows();
  if (metadata) {
    metadata->seeds = plan.seeds;
  }
  return table;
}

std::vector<SummaryRow> summarize(const ResultTable& table,
                                  const std::string& baseline_transform) {
  // (paradigm, model) -> transform -> (unit, seed) -> accuracy
  using UnitKey = std::pair<std::string, uint64_t>;
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, std::map<UnitKey, double>>>
      groups;
  for (const ResultRow& row : table.rows) {
    if (row.status != "ok") continue;
    groups[{row.paradigm, row.model}][row.transform][{row.unit, row.seed}] = row.accuracy;
  }

  std::vector<SummaryRow> out;
  for (const auto& [pm, by_transform] : groups) {
    const auto baseline_it = by_transform.find(baseline_transform);
    if (baseline_it == by_transform.end()) {
      fail(ErrorCode::PairingError, "baseline transform '" + baseline_transform +
                                        "' absent for paradigm " + pm.first + ", model " +
                                        pm.second);
    }
    for (const auto& [transform, units] : by_transform) {
      SummaryRow row;
      row.paradigm = pm.first;
      row.model = pm.second;
      row.transform = transform;
      row.n_units = static_cast<int>(units.size());

      double sum = 0.0, sum_sq = 0.0;
      for (const auto& [key, acc] : units) {
        sum += acc;
        sum_sq += acc * acc;
      }
      const double n = static_cast<double>(units.size());
      const double mean = sum / n;
      row.mean_pct = 100.0 * mean;
      row.std_pct = 100.0 * std::sqrt(std::max(0.0, sum_sq / n - mean * mean));

      std::vector<double> deltas;
      for (const auto& [key, acc] : units) {
        const auto match = baseline_it->second.find(key);
        if (match != baseline_it->second.end()) {
          deltas.push_back(acc - match->second);
        }
      }
      if (deltas.empty()) {
        fail(ErrorCode::PairingError, "no (unit, seed) pairs match the baseline for " +
                                          pm.first + "/" + pm.second + "/" + transform);
      }
      double dsum = 0.0, dsq = 0.0;
      for (double d : deltas) {
        dsum += d;
        dsq += d * d;
      }
      const double dn = static_cast<double>(deltas.size());
      const double dmean = dsum / dn;
      row.has_delta = true;
      row.delta_mean_pts = 100.0 * dmean;
      row.delta_std_pts = 100.0 * std::sqrt(std::max(0.0, dsq / dn - dmean * dmean));
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace easr
