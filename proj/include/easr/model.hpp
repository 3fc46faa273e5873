// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "easr/core.hpp"
#include "easr/rng.hpp"

namespace easr {

// Architecture constants for the convolutional decoder. Pool window/stride of 0
// resolve to T_conv/4 and T_conv/8 at build time.
struct ModelConfig {
  int temporal_filters = 8;  // F_t
  int kernel_length = 25;    // k_t
  int spatial_filters = 8;   // F_s
  int pool_window = 0;
  int pool_stride = 0;
};

struct TrainConfig {
  int max_epochs = 200;
  int patience = 75;
  double learning_rate = 6.25e-4;
  double weight_decay = 0.1;
  int batch_size = 64;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int fine_tune_epochs = 100;
  int fine_tune_patience = 30;
  uint64_t seed = 0;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> valid_loss;
  std::vector<double> valid_accuracy;
  int best_epoch = 0;  // 1-based; 0 = no epochs ran
  bool stopped_early = false;
};

// Class weights w_c = 1 / (K_present * freq_c), normalized so that
// sum_c w_c * freq_c = 1 over the training split.
Vector balanced_class_weights(const std::vector<int>& class_counts);

// Weighted mean of -w_{y_i} * log softmax(logits_i)[y_i]. Rows of `logits` are
// samples, columns classes.
double balanced_cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                              const Vector& class_weights);

// Row-wise stable softmax.
Matrix softmax_rows(const Matrix& logits);

// A decoder owns its parameter tensors; forward/backward are defined per
// concrete architecture. All math is float64.
class Decoder {
 public:
  virtual ~Decoder() = default;
  virtual std::unique_ptr<Decoder> clone() const = 0;
  virtual std::string kind() const = 0;
  virtual int class_count() const = 0;

  // Logits, one row per trial.
  virtual Matrix forward(const std::vector<const TrialMatrix*>& batch) const = 0;

  // Parameter gradients of the balanced cross-entropy over the batch, same
  // shapes as params(). Also reports the loss.
  virtual std::vector<Matrix> gradient(const std::vector<const TrialMatrix*>& batch,
                                       const std::vector<int>& labels,
                                       const Vector& class_weights,
                                       double* loss_out) const = 0;

  virtual std::vector<Matrix>& params() = 0;
  virtual const std::vector<Matrix>& params() const = 0;
  virtual std::vector<std::string> param_names() const = 0;
};

// Temporal conv -> spatial projection -> square -> mean pool -> log -> dense.
class ShallowDecoder : public Decoder {
 public:
  ShallowDecoder(int channels, int samples, int classes, const ModelConfig& cfg,
                 uint64_t seed);

  std::unique_ptr<Decoder> clone() const override;
  std::string kind() const override { return "shallow"; }
  int class_count() const override { return classes_; }
  Matrix forward(const std::vector<const TrialMatrix*>& batch) const override;
  std::vector<Matrix> gradient(const std::vector<const TrialMatrix*>& batch,
                               const std::vector<int>& labels, const Vector& class_weights,
                               double* loss_out) const override;
  std::vector<Matrix>& params() override { return params_; }
  const std::vector<Matrix>& params() const override { return params_; }
  std::vector<std::string> param_names() const override;

  int conv_length() const { return conv_len_; }
  int pool_window() const { return pool_window_; }
  int pool_stride() const { return pool_stride_; }
  int pooled_count() const { return n_windows_; }
  int channels() const { return channels_; }
  int samples() const { return samples_; }
  const ModelConfig& config() const { return cfg_; }

  // Tensor order inside params(): temporal (F_t x k_t), spatial
  // (F_s x C*F_t), classifier weights (K x F_s*n_windows), classifier bias (1 x K).
  static constexpr int kTemporal = 0;
  static constexpr int kSpatial = 1;
  static constexpr int kClassifier = 2;
  static constexpr int kBias = 3;

 private:
  struct TrialTrace;  // per-trial forward cache used by the backward pass
  void forward_one(const TrialMatrix& trial, TrialTrace& trace) const;

  int channels_ = 0, samples_ = 0, classes_ = 0;
  ModelConfig cfg_;
  int conv_len_ = 0, pool_window_ = 0, pool_stride_ = 0, n_windows_ = 0;
  std::vector<Matrix> params_;
};

// Multinomial logistic regression on per-channel log-variance features
// log(mean_t x_{c,t}^2 + eps); a raw-sample linear map cannot see phase-random
// oscillatory structure, log-variance is the standard minimal EEG baseline.
class LinearDecoder : public Decoder {
 public:
  LinearDecoder(int channels, int samples, int classes);

  std::unique_ptr<Decoder> clone() const override;
  std::string kind() const override { return "linear"; }
  int class_count() const override { return classes_; }
  Matrix forward(const std::vector<const TrialMatrix*>& batch) const override;
  std::vector<Matrix> gradient(const std::vector<const TrialMatrix*>& batch,
                               const std::vector<int>& labels, const Vector& class_weights,
                               double* loss_out) const override;
  std::vector<Matrix>& params() override { return params_; }
  const std::vector<Matrix>& params() const override { return params_; }
  std::vector<std::string> param_names() const override { return {"weights", "bias"}; }

  static constexpr int kWeights = 0;
  static constexpr int kBias = 1;

 private:
  Vector features(const TrialMatrix& trial) const;

  int channels_ = 0, samples_ = 0, classes_ = 0;
  std::vector<Matrix> params_;
};

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;

  static AdamState like(const std::vector<Matrix>& params);
};

// Adam with bias correction and decoupled weight decay:
//   p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + wd * p)
void adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
               AdamState& state, const TrainConfig& cfg, int64_t t);

using Augmenter =
    std::function<std::vector<LabeledTrial>(const std::vector<LabeledTrial>&, Rng&)>;

// Epoch loop with seeded shuffling, optional per-batch augmentation,
// validation-loss early stopping. Returns the decoder to its best-epoch
// parameters. An empty validation set disables early stopping (full epoch
// budget, final parameters kept).
TrainHistory train(Decoder& decoder, const TrialSet& train_set, const TrialSet& valid_set,
                   const TrainConfig& cfg, const Augmenter& augmenter = nullptr);

// Same loop with fine_tune_epochs / fine_tune_patience; all layers trainable.
TrainHistory fine_tune(Decoder& decoder, const TrialSet& target_train,
                       const TrialSet& target_valid, const TrainConfig& cfg,
                       const Augmenter& augmenter = nullptr);

struct EvalResult {
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;  // rows = true class, cols = predicted
};

EvalResult evaluate(const Decoder& decoder, const TrialSet& test_set);

}  // namespace easr
