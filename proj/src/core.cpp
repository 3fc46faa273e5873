// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/core.hpp"

#include <cmath>
#include <string>

namespace easr {

void TrialMatrix::validate() const {
  if (data.rows() < 2 || data.cols() < 2) {
    fail(ErrorCode::InvalidSignal,
         "trial must be at least 2x2, got " + std::to_string(data.rows()) + "x" +
             std::to_string(data.cols()));
  }
  if (!data.allFinite()) {
    fail(ErrorCode::InvalidSignal, "trial contains non-finite samples");
  }
}

void TrialSet::validate() const {
  if (class_count <= 0) fail(ErrorCode::InvalidLabel, "class_count must be positive");
  if (trials.empty()) return;
  const int c = trials.front().trial.channel_count();
  const int t = trials.front().trial.sample_count();
  for (size_t i = 0; i < trials.size(); ++i) {
    const LabeledTrial& lt = trials[i];
    if (lt.trial.channel_count() != c || lt.trial.sample_count() != t) {
      fail(ErrorCode::DimensionMismatch,
           "trial " + std::to_string(i) + " has shape " +
               std::to_string(lt.trial.channel_count()) + "x" +
               std::to_string(lt.trial.sample_count()) + ", expected " +
               std::to_string(c) + "x" + std::to_string(t));
    }
    if (lt.label < 0 || lt.label >= class_count) {
      fail(ErrorCode::InvalidLabel,
           "trial " + std::to_string(i) + " label " + std::to_string(lt.label) +
               " outside [0, " + std::to_string(class_count) + ")");
    }
  }
}

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

void SpdMatrix::validate() const {
  if (data.rows() != data.cols()) {
    fail(ErrorCode::NotSymmetric, "matrix is not square");
  }
  if (!data.allFinite()) {
    fail(ErrorCode::NotSymmetric, "matrix contains non-finite entries");
  }
  if (!is_symmetric(data)) {
    fail(ErrorCode::NotSymmetric, "matrix exceeds 1e-10 relative asymmetry");
  }
}

SpdMatrix trial_covariance(const TrialMatrix& trial) {
  if (!trial.data.allFinite()) {
    fail(ErrorCode::InvalidSignal, "trial contains non-finite samples");
  }
  Matrix gram = trial.data * trial.data.transpose();
  // enforce exact symmetry against rounding in the product
  gram = 0.5 * (gram + gram.transpose()).eval();
  return SpdMatrix(std::move(gram));
}

SymmetricEigen eig_symmetric(const SpdMatrix& m) {
  m.validate();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.data);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::NotSymmetric, "eigendecomposition failed to converge");
  }
  const int n = m.dim();
  SymmetricEigen out;
  out.eigenvalues = Vector(n);
  out.eigenvectors = Matrix(n, n);
  // Eigen returns ascending order; flip to descending.
  for (int i = 0; i < n; ++i) {
    out.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
    out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

SpdMatrix inv_sqrtm(const SpdMatrix& m, double eigenvalue_floor_rel) {
  SymmetricEigen eig = eig_symmetric(m);
  const double lambda_max = eig.eigenvalues(0);
  const double floor = eigenvalue_floor_rel * std::max(lambda_max, 0.0);
  Vector inv_sqrt(eig.eigenvalues.size());
  for (int i = 0; i < eig.eigenvalues.size(); ++i) {
    const double clamped = std::max(eig.eigenvalues(i), floor);
    if (clamped <= 0.0) {
      fail(ErrorCode::DegenerateCovariance,
           "eigenvalue " + std::to_string(eig.eigenvalues(i)) +
               " not recoverable with floor " + std::to_string(floor));
    }
    inv_sqrt(i) = 1.0 / std::sqrt(clamped);
  }
  Matrix result = eig.eigenvectors * inv_sqrt.asDiagonal() * eig.eigenvectors.transpose();
  result = 0.5 * (result + result.transpose()).eval();
  return SpdMatrix(std::move(result));
}

}  // namespace easr
