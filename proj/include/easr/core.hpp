// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "easr/error.hpp"

namespace easr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// One EEG trial: C channels x T time samples, microvolts after preprocessing.
struct TrialMatrix {
  Matrix data;

  TrialMatrix() = default;
  explicit TrialMatrix(Matrix m) : data(std::move(m)) { validate(); }

  int channel_count() const { return static_cast<int>(data.rows()); }
  int sample_count() const { return static_cast<int>(data.cols()); }

  // C >= 2, T >= 2, all entries finite.
  void validate() const;
};

struct LabeledTrial {
  TrialMatrix trial;
  int label = 0;
  int subject_id = 0;
  int run_id = 0;
};

// The unit all transforms operate on: labeled trials of identical shape.
struct TrialSet {
  std::vector<LabeledTrial> trials;
  int class_count = 0;
  double sampling_rate_hz = 0.0;
  bool preprocessed = false;
  bool aligned = false;

  int channel_count() const {
    return trials.empty() ? 0 : trials.front().trial.channel_count();
  }
  int sample_count() const {
    return trials.empty() ? 0 : trials.front().trial.sample_count();
  }

  // Uniform shapes, labels within [0, class_count).
  void validate() const;
};

// Real symmetric positive (semi-)definite matrix, symmetric to within 1e-10
// relative tolerance.
struct SpdMatrix {
  Matrix data;

  SpdMatrix() = default;
  explicit SpdMatrix(Matrix m) : data(std::move(m)) { validate(); }

  int dim() const { return static_cast<int>(data.rows()); }
  void validate() const;
};

bool is_symmetric(const Matrix& m, double rel_tol = 1e-10);

// Gram matrix x * x^T (no 1/T factor).
SpdMatrix trial_covariance(const TrialMatrix& trial);

struct SymmetricEigen {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // orthonormal columns, matching order
};

// m = V diag(lambda) V^T with descending eigenvalues.
SymmetricEigen eig_symmetric(const SpdMatrix& m);

// V diag(max(lambda, floor))^(-1/2) V^T with floor = eigenvalue_floor_rel *
// lambda_max. The relative floor keeps the regularization scale-invariant.
SpdMatrix inv_sqrtm(const SpdMatrix& m, double eigenvalue_floor_rel = 1e-10);

}  // namespace easr
