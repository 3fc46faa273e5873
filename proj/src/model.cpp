// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace easr {

namespace {

constexpr double kPoolLogEps = 1e-6;
constexpr double kLogVarEps = 1e-12;

// rng stream tags
constexpr uint64_t kTagInit = 11;
constexpr uint64_t kTagShuffle = 12;
constexpr uint64_t kTagAugment = 13;

std::vector<const TrialMatrix*> batch_pointers(const std::vector<LabeledTrial>& trials) {
  std::vector<const TrialMatrix*> out;
  out.reserve(trials.size());
  for (const LabeledTrial& lt : trials) out.push_back(&lt.trial);
  return out;
}

std::vector<int> batch_labels(const std::vector<LabeledTrial>& trials) {
  std::vector<int> out;
  out.reserve(trials.size());
  for (const LabeledTrial& lt : trials) out.push_back(lt.label);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0 && adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    fail(ErrorCode::InvalidPlan, "Adam betas must lie in (0, 1)");
  }
  if (patience > max_epochs) {
    fail(ErrorCode::InvalidPlan, "patience must not exceed max_epochs");
  }
  if (batch_size <= 0 || max_epochs < 0 || fine_tune_epochs < 0) {
    fail(ErrorCode::InvalidPlan, "nonsensical training configuration");
  }
}

Vector balanced_class_weights(const std::vector<int>& class_counts) {
  const int k = static_cast<int>(class_counts.size());
  int total = 0;
  int present = 0;
  for (int c : class_counts) {
    if (c < 0) fail(ErrorCode::InvalidLabel, "negative class count");
    total += c;
    if (c > 0) ++present;
  }
  if (total == 0 || present == 0) {
    fail(ErrorCode::EmptySplit, "cannot derive class weights from an empty split");
  }
  Vector w = Vector::Zero(k);
  for (int c = 0; c < k; ++c) {
    if (class_counts[size_t(c)] > 0) {
      const double freq = static_cast<double>(class_counts[size_t(c)]) / total;
      w(c) = 1.0 / (present * freq);
    }
  }
  return w;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix probs(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(i).array() - m).exp();
    probs.row(i) = e / e.sum();
  }
  return probs;
}

double balanced_cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                              const Vector& class_weights) {
  if (static_cast<size_t>(logits.rows()) != labels.size()) {
    fail(ErrorCode::DimensionMismatch, "logit rows must match label count");
  }
  const int k = static_cast<int>(logits.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const int y = labels[size_t(i)];
    if (y < 0 || y >= k) {
      fail(ErrorCode::InvalidLabel, "label " + std::to_string(y) + " outside [0, " +
                                        std::to_string(k) + ")");
    }
    const double m = logits.row(i).maxCoeff();
    const double log_z = std::log((logits.row(i).array() - m).exp().sum()) + m;
    loss += class_weights(y) * (log_z - logits(i, y));
  }
  return loss / static_cast<double>(logits.rows());
}

// ---------------------------------------------------------------------------
// ShallowDecoder

struct ShallowDecoder::TrialTrace {
  std::vector<Matrix> xcols;  // per channel: k_t x T'
  Matrix conv;                // (C*F_t) x T'
  Matrix spatial;             // F_s x T'
  Matrix pooled;              // F_s x n_windows
  Vector feat;                // F_s * n_windows
};

ShallowDecoder::ShallowDecoder(int channels, int samples, int classes,
                               const ModelConfig& cfg, uint64_t seed)
    : channels_(channels), samples_(samples), classes_(classes), cfg_(cfg) {
  if (channels < 2 || samples < 2 || classes < 2) {
    fail(ErrorCode::InvalidPlan, "decoder needs C >= 2, T >= 2, K >= 2");
  }
  if (cfg.kernel_length < 1 || cfg.kernel_length > samples) {
    fail(ErrorCode::InvalidPlan, "temporal kernel longer than the trial");
  }
  conv_len_ = samples - cfg.kernel_length + 1;
  pool_window_ = cfg.pool_window > 0 ? cfg.pool_window : std::max(1, conv_len_ / 4);
  pool_stride_ = cfg.pool_stride > 0 ? cfg.pool_stride : std::max(1, conv_len_ / 8);
  if (pool_window_ > conv_len_) {
    fail(ErrorCode::InvalidPlan, "pool window exceeds the convolved length");
  }
  n_windows_ = (conv_len_ - pool_window_) / pool_stride_ + 1;

  const int ft = cfg.temporal_filters;
  const int fs = cfg.spatial_filters;
  const int d = fs * n_windows_;

  params_.resize(4);
  params_[kTemporal] = Matrix(ft, cfg.kernel_length);
  params_[kSpatial] = Matrix(fs, channels * ft);
  params_[kClassifier] = Matrix::Zero(classes, d);
  params_[kBias] = Matrix::Zero(1, classes);

  // temporal/spatial: uniform in +-1/sqrt(fan_in); classifier zero-initialized
  // so untrained logits are class-symmetric
  Rng rng_t(derive_seed(seed, {kTagInit, 0}));
  const double bound_t = 1.0 / std::sqrt(static_cast<double>(cfg.kernel_length));
  for (int i = 0; i < params_[kTemporal].rows(); ++i) {
    for (int j = 0; j < params_[kTemporal].cols(); ++j) {
      params_[kTemporal](i, j) = rng_t.uniform(-bound_t, bound_t);
    }
  }
  Rng rng_s(derive_seed(seed, {kTagInit, 1}));
  const double bound_s = 1.0 / std::sqrt(static_cast<double>(channels * ft));
  for (int i = 0; i < params_[kSpatial].rows(); ++i) {
    for (int j = 0; j < params_[kSpatial].cols(); ++j) {
      params_[kSpatial](i, j) = rng_s.uniform(-bound_s, bound_s);
    }
  }
}

std::unique_ptr<Decoder> ShallowDecoder::clone() const {
  return std::make_unique<ShallowDecoder>(*this);
}

std::vector<std::string> ShallowDecoder::param_names() const {
  return {"temporal_filters", "spatial_filters", "classifier_weights", "classifier_bias"};
}

void ShallowDecoder::forward_one(const TrialMatrix& trial, TrialTrace& trace) const {
  if (trial.channel_count() != channels_ || trial.sample_count() != samples_) {
    fail(ErrorCode::DimensionMismatch,
         "trial shape " + std::to_string(trial.channel_count()) + "x" +
             std::to_string(trial.sample_count()) + " does not match decoder " +
             std::to_string(channels_) + "x" + std::to_string(samples_));
  }
  const int ft = cfg_.temporal_filters;
  const int kt = cfg_.kernel_length;
  const Matrix& wt = params_[kTemporal];
  const Matrix& ws = params_[kSpatial];

  trace.xcols.resize(size_t(channels_));
  trace.conv.resize(channels_ * ft, conv_len_);
  for (int c = 0; c < channels_; ++c) {
    Matrix& xcol = trace.xcols[size_t(c)];
    xcol.resize(kt, conv_len_);
    for (int i = 0; i < kt; ++i) {
      xcol.row(i) = trial.data.row(c).segment(i, conv_len_);
    }
    trace.conv.middleRows(c * ft, ft).noalias() = wt * xcol;
  }

  trace.spatial.noalias() = ws * trace.conv;

  const int fs = cfg_.spatial_filters;
  trace.pooled.resize(fs, n_windows_);
  for (int w = 0; w < n_windows_; ++w) {
    trace.pooled.col(w) =
        trace.spatial.middleCols(w * pool_stride_, pool_window_).array().square().rowwise().sum() /
        static_cast<double>(pool_window_);
  }

  trace.feat.resize(fs * n_windows_);
  for (int g = 0; g < fs; ++g) {
    for (int w = 0; w < n_windows_; ++w) {
      trace.feat(g * n_windows_ + w) = std::log(trace.pooled(g, w) + kPoolLogEps);
    }
  }
}

Matrix ShallowDecoder::forward(const std::vector<const TrialMatrix*>& batch) const {
  Matrix logits(static_cast<Eigen::Index>(batch.size()), classes_);
  TrialTrace trace;
  for (size_t i = 0; i < batch.size(); ++i) {
    forward_one(*batch[i], trace);
    logits.row(static_cast<Eigen::Index>(i)) =
        (params_[kClassifier] * trace.feat).transpose() + params_[kBias].row(0);
  }
  return logits;
}

std::vector<Matrix> ShallowDecoder::gradient(const std::vector<const TrialMatrix*>& batch,
                                             const std::vector<int>& labels,
                                             const Vector& class_weights,
                                             double* loss_out) const {
  const int n = static_cast<int>(batch.size());
  if (n == 0) fail(ErrorCode::EmptySplit, "gradient of an empty batch");

  const int ft = cfg_.temporal_filters;
  const int fs = cfg_.spatial_filters;
  std::vector<Matrix> grads(4);
  for (int p = 0; p < 4; ++p) grads[size_t(p)] = Matrix::Zero(params_[size_t(p)].rows(), params_[size_t(p)].cols());

  double loss = 0.0;
  TrialTrace trace;
  Matrix g_pool(fs, n_windows_);
  Matrix g_sq(fs, conv_len_);

  for (int i = 0; i < n; ++i) {
    forward_one(*batch[size_t(i)], trace);
    Vector logits = params_[kClassifier] * trace.feat + params_[kBias].row(0).transpose();

    const int y = labels[size_t(i)];
    if (y < 0 || y >= classes_) {
      fail(ErrorCode::InvalidLabel, "label " + std::to_string(y) + " outside [0, " +
                                        std::to_string(classes_) + ")");
    }
    const double m = logits.maxCoeff();
    Vector p = (logits.array() - m).exp();
    const double z = p.sum();
    p /= z;
    loss += class_weights(y) * (std::log(z) + m - logits(y));

    Vector g_logits = (class_weights(y) / n) * p;
    g_logits(y) -= class_weights(y) / n;

    grads[kClassifier].noalias() += g_logits * trace.feat.transpose();
    grads[kBias].row(0) += g_logits.transpose();

    Vector g_feat = params_[kClassifier].transpose() * g_logits;
    for (int g = 0; g < fs; ++g) {
      for (int w = 0; w < n_windows_; ++w) {
        g_pool(g, w) = g_feat(g * n_windows_ + w) / (trace.pooled(g, w) + kPoolLogEps);
      }
    }

    g_sq.setZero();
    for (int w = 0; w < n_windows_; ++w) {
      for (int g = 0; g < fs; ++g) {
        g_sq.row(g).segment(w * pool_stride_, pool_window_).array() +=
            g_pool(g, w) / static_cast<double>(pool_window_);
      }
    }
    Matrix g_spatial = 2.0 * trace.spatial.cwiseProduct(g_sq);

    grads[kSpatial].noalias() += g_spatial * trace.conv.transpose();
    Matrix g_conv = params_[kSpatial].transpose() * g_spatial;

    for (int c = 0; c < channels_; ++c) {
      grads[kTemporal].noalias() +=
          g_conv.middleRows(c * ft, ft) * trace.xcols[size_t(c)].transpose();
    }
  }

  if (loss_out) *loss_out = loss / n;
  return grads;
}

// ---------------------------------------------------------------------------
// LinearDecoder

LinearDecoder::LinearDecoder(int channels, int samples, int classes)
    : channels_(channels), samples_(samples), classes_(classes) {
  if (channels < 1 || samples < 1 || classes < 2) {
    fail(ErrorCode::InvalidPlan, "linear decoder needs C >= 1, T >= 1, K >= 2");
  }
  params_.resize(2);
  params_[kWeights] = Matrix::Zero(classes, channels);
  params_[kBias] = Matrix::Zero(1, classes);
}

std::unique_ptr<Decoder> LinearDecoder::clone() const {
  return std::make_unique<LinearDecoder>(*this);
}

Vector LinearDecoder::features(const TrialMatrix& trial) const {
  if (trial.channel_count() != channels_ || trial.sample_count() != samples_) {
    fail(ErrorCode::DimensionMismatch, "trial shape does not match decoder");
  }
  Vector f(channels_);
  for (int c = 0; c < channels_; ++c) {
    f(c) = std::log(trial.data.row(c).squaredNorm() / samples_ + kLogVarEps);
  }
  return f;
}

Matrix LinearDecoder::forward(const std::vector<const TrialMatrix*>& batch) const {
  Matrix logits(static_cast<Eigen::Index>(batch.size()), classes_);
  for (size_t i = 0; i < batch.size(); ++i) {
    logits.row(static_cast<Eigen::Index>(i)) =
        (params_[kWeights] * features(*batch[i])).transpose() + params_[kBias].row(0);
  }
  return logits;
}

std::vector<Matrix> LinearDecoder::gradient(const std::vector<const TrialMatrix*>& batch,
                                            const std::vector<int>& labels,
                                            const Vector& class_weights,
                                            double* loss_out) const {
  const int n = static_cast<int>(batch.size());
  if (n == 0) fail(ErrorCode::EmptySplit, "gradient of an empty batch");
  std::vector<Matrix> grads(2);
  grads[kWeights] = Matrix::Zero(classes_, channels_);
  grads[kBias] = Matrix::Zero(1, classes_);

  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector f = features(*batch[size_t(i)]);
    Vector logits = params_[kWeights] * f + params_[kBias].row(0).transpose();
    const int y = labels[size_t(i)];
    if (y < 0 || y >= classes_) {
      fail(ErrorCode::InvalidLabel, "label outside class range");
    }
    const double m = logits.maxCoeff();
    Vector p = (logits.array() - m).exp();
    const double z = p.sum();
    p /= z;
    loss += class_weights(y) * (std::log(z) + m - logits(y));

    Vector g_logits = (class_weights(y) / n) * p;
    g_logits(y) -= class_weights(y) / n;
    grads[kWeights].noalias() += g_logits * f.transpose();
    grads[kBias].row(0) += g_logits.transpose();
  }
  if (loss_out) *loss_out = loss / n;
  return grads;
}

// ---------------------------------------------------------------------------
// Optimizer

AdamState AdamState::like(const std::vector<Matrix>& params) {
  AdamState s;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const Matrix& p : params) {
    s.m.push_back(Matrix::Zero(p.rows(), p.cols()));
    s.v.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
  return s;
}

void adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
               AdamState& state, const TrainConfig& cfg, int64_t t) {
  if (t < 1) fail(ErrorCode::InvalidPlan, "Adam step index starts at 1");
  const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
  for (size_t p = 0; p < params.size(); ++p) {
    if (!grads[p].allFinite()) {
      fail(ErrorCode::NonFiniteGradient,
           "non-finite gradient in tensor " + std::to_string(p) + " at step " +
               std::to_string(t));
    }
    state.m[p] = cfg.adam_beta1 * state.m[p] + (1.0 - cfg.adam_beta1) * grads[p];
    state.v[p] = cfg.adam_beta2 * state.v[p] + (1.0 - cfg.adam_beta2) * grads[p].cwiseProduct(grads[p]);
    const Matrix m_hat = state.m[p] / bc1;
    const Matrix denom = ((state.v[p] / bc2).array().sqrt() + cfg.adam_eps).matrix();
    params[p] -= cfg.learning_rate * (m_hat.cwiseQuotient(denom) + cfg.weight_decay * params[p]);
  }
}

// ---------------------------------------------------------------------------
// Training loop

namespace {

std::vector<int> count_classes(const TrialSet& set) {
  std::vector<int> counts(size_t(set.class_count), 0);
  for (const LabeledTrial& lt : set.trials) {
    if (lt.label < 0 || lt.label >= set.class_count) {
      fail(ErrorCode::InvalidLabel, "label outside declared class count");
    }
    ++counts[size_t(lt.label)];
  }
  return counts;
}

TrainHistory train_loop(Decoder& decoder, const TrialSet& train_set,
                        const TrialSet& valid_set, const TrainConfig& cfg, int max_epochs,
                        int patience, const Augmenter& augmenter) {
  cfg.validate();
  if (train_set.trials.empty()) {
    fail(ErrorCode::EmptySplit, "training split is empty");
  }
  TrainHistory history;
  if (max_epochs == 0) return history;

  const Vector class_weights = balanced_class_weights(count_classes(train_set));
  const std::vector<const TrialMatrix*> valid_ptrs = batch_pointers(valid_set.trials);
  const std::vector<int> valid_labels = batch_labels(valid_set.trials);
  const bool has_valid = !valid_set.trials.empty();

  AdamState opt = AdamState::like(decoder.params());
  int64_t step = 0;

  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<Matrix> best_params = decoder.params();
  int best_epoch = 0;
  int epochs_since_best = 0;

  const size_t n = train_set.trials.size();
  std::vector<size_t> order(n);

  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, {kTagShuffle, static_cast<uint64_t>(epoch)}));
    for (size_t i = 0; i < n; ++i) order[i] = i;
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    size_t epoch_samples = 0;
    const size_t bs = static_cast<size_t>(cfg.batch_size);
    size_t batch_index = 0;
    for (size_t start = 0; start < n; start += bs, ++batch_index) {
      const size_t stop = std::min(n, start + bs);
      std::vector<LabeledTrial> batch(train_set.trials.begin() + static_cast<long>(start),
                                      train_set.trials.begin() + static_cast<long>(stop));
      if (augmenter) {
        Rng aug_rng(derive_seed(cfg.seed, {kTagAugment, static_cast<uint64_t>(epoch),
                                           static_cast<uint64_t>(batch_index)}));
        batch = augmenter(batch, aug_rng);
      }
      double batch_loss = 0.0;
      std::vector<Matrix> grads = decoder.gradient(batch_pointers(batch),
                                                   batch_labels(batch), class_weights,
                                                   &batch_loss);
      adam_step(decoder.params(), grads, opt, cfg, ++step);
      epoch_loss += batch_loss * static_cast<double>(batch.size());
      epoch_samples += batch.size();
    }
    history.train_loss.push_back(epoch_loss / static_cast<double>(epoch_samples));

    if (!has_valid) continue;

    const Matrix logits = decoder.forward(valid_ptrs);
    const double vloss = balanced_cross_entropy(logits, valid_labels, class_weights);
    int correct = 0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      int arg = 0;
      for (int k = 1; k < logits.cols(); ++k) {
        if (logits(i, k) > logits(i, arg)) arg = k;
      }
      if (arg == valid_labels[size_t(i)]) ++correct;
    }
    history.valid_loss.push_back(vloss);
    history.valid_accuracy.push_back(static_cast<double>(correct) /
                                     static_cast<double>(valid_labels.size()));

    if (vloss < best_loss) {
      best_loss = vloss;
      best_epoch = epoch;
      best_params = decoder.params();
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
    }
    if (epochs_since_best > patience) {
      history.stopped_early = true;
      break;
    }
  }

  if (has_valid) {
    decoder.params() = best_params;
    history.best_epoch = best_epoch;
  } else {
    history.best_epoch = static_cast<int>(history.train_loss.size());
  }
  return history;
}

}  // namespace

TrainHistory train(Decoder& decoder, const TrialSet& train_set, const TrialSet& valid_set,
                   const TrainConfig& cfg, const Augmenter& augmenter) {
  return train_loop(decoder, train_set, valid_set, cfg, cfg.max_epochs, cfg.patience,
                    augmenter);
}

TrainHistory fine_tune(Decoder& decoder, const TrialSet& target_train,
                       const TrialSet& target_valid, const TrainConfig& cfg,
                       const Augmenter& augmenter) {
  return train_loop(decoder, target_train, target_valid, cfg, cfg.fine_tune_epochs,
                    cfg.fine_tune_patience, augmenter);
}

EvalResult evaluate(const Decoder& decoder, const TrialSet& test_set) {
  if (test_set.trials.empty()) {
    fail(ErrorCode::EmptySplit, "test split is empty");
  }
  const int k = decoder.class_count();
  EvalResult result;
  result.confusion = Eigen::MatrixXi::Zero(k, k);

  const Matrix logits = decoder.forward(batch_pointers(test_set.trials));
  int correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    int arg = 0;
    for (int c = 1; c < k; ++c) {
      if (logits(i, c) > logits(i, arg)) arg = c;
    }
    const int y = test_set.trials[size_t(i)].label;
    if (y < 0 || y >= k) fail(ErrorCode::InvalidLabel, "test label outside class range");
    result.confusion(y, arg) += 1;
    if (arg == y) ++correct;
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(logits.rows());
  return result;
}

}  // namespace easr
