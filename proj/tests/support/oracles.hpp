// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-side oracles, kept independent of the library implementation paths they
// check: brute-force loops, naive DFT features, a closed-form ridge decoder.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "easr/core.hpp"
#include "easr/model.hpp"
#include "easr/rng.hpp"

namespace easr::oracle {

// Gram matrix by explicit double loop.
inline Matrix brute_force_gram(const Matrix& x) {
  Matrix g = Matrix::Zero(x.rows(), x.rows());
  for (Eigen::Index a = 0; a < x.rows(); ++a) {
    for (Eigen::Index b = 0; b < x.rows(); ++b) {
      double acc = 0.0;
      for (Eigen::Index t = 0; t < x.cols(); ++t) acc += x(a, t) * x(b, t);
      g(a, b) = acc;
    }
  }
  return g;
}

inline Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

// Random SPD built as A*A^T + I.
inline Matrix random_spd(int dim, Rng& rng) {
  const Matrix a = random_matrix(dim, dim, rng);
  return a * a.transpose() + Matrix::Identity(dim, dim);
}

// Central finite-difference check of Decoder::gradient against forward +
// balanced_cross_entropy. Returns the max relative error over all entries.
inline double finite_difference_error(Decoder& decoder,
                                      const std::vector<const TrialMatrix*>& batch,
                                      const std::vector<int>& labels,
                                      const Vector& class_weights, double h = 1e-4) {
  double loss = 0.0;
  const std::vector<Matrix> grads = decoder.gradient(batch, labels, class_weights, &loss);

  auto loss_at = [&]() {
    return balanced_cross_entropy(decoder.forward(batch), labels, class_weights);
  };

  double worst = 0.0;
  for (size_t p = 0; p < grads.size(); ++p) {
    Matrix& tensor = decoder.params()[p];
    for (Eigen::Index i = 0; i < tensor.rows(); ++i) {
      for (Eigen::Index j = 0; j < tensor.cols(); ++j) {
        const double saved = tensor(i, j);
        tensor(i, j) = saved + h;
        const double up = loss_at();
        tensor(i, j) = saved - h;
        const double down = loss_at();
        tensor(i, j) = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double analytic = grads[p](i, j);
        const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
        worst = std::max(worst, std::abs(numeric - analytic) / scale);
      }
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Brute-force linear decoder on band-limited covariance features (naive DFT).

struct BandCovFeatures {
  double f_lo1, f_hi1, f_lo2, f_hi2;

  // vech of the band-limited covariance for both bands.
  Vector operator()(const TrialMatrix& trial, double fs) const {
    const int c = trial.channel_count();
    const int t = trial.sample_count();
    Vector out(c * (c + 1));  // two bands x c(c+1)/2
    int cursor = 0;
    for (const auto& [lo, hi] : {std::pair{f_lo1, f_hi1}, std::pair{f_lo2, f_hi2}}) {
      Matrix band_cov = Matrix::Zero(c, c);
      for (int k = 1; k < t / 2; ++k) {
        const double freq = fs * k / t;
        if (freq < lo || freq > hi) continue;
        std::vector<std::complex<double>> coeff(static_cast<size_t>(c));
        for (int ch = 0; ch < c; ++ch) {
          std::complex<double> acc(0.0, 0.0);
          for (int ts = 0; ts < t; ++ts) {
            const double angle = -2.0 * M_PI * k * ts / t;
            acc += trial.data(ch, ts) * std::complex<double>(std::cos(angle), std::sin(angle));
          }
          coeff[size_t(ch)] = acc;
        }
        for (int a = 0; a < c; ++a) {
          for (int b = 0; b < c; ++b) {
            band_cov(a, b) += (coeff[size_t(a)] * std::conj(coeff[size_t(b)])).real();
          }
        }
      }
      band_cov *= 2.0 / (double(t) * double(t));
      for (int a = 0; a < c; ++a) {
        for (int b = a; b < c; ++b) out(cursor++) = band_cov(a, b);
      }
    }
    return out;
  }
};

struct RidgeDecoder {
  Vector mean;
  Matrix weights;  // features x classes

  static RidgeDecoder fit(const Matrix& features, const std::vector<int>& labels,
                          int n_classes, double lambda = 1e-2) {
    const Eigen::Index n = features.rows();
    const Eigen::Index d = features.cols();
    RidgeDecoder dec;
    dec.mean = features.colwise().mean();
    Matrix centered = features.rowwise() - dec.mean.transpose();
    Matrix y = Matrix::Zero(n, n_classes);
    for (Eigen::Index i = 0; i < n; ++i) y(i, labels[size_t(i)]) = 1.0;
    Matrix gram = centered.transpose() * centered +
                  lambda * double(n) * Matrix::Identity(d, d);
    dec.weights = gram.ldlt().solve(centered.transpose() * y);
    return dec;
  }

  int predict(const Vector& feature) const {
    Vector score = weights.transpose() * (feature - mean);
    int arg = 0;
    for (int k = 1; k < score.size(); ++k) {
      if (score(k) > score(arg)) arg = k;
    }
    return arg;
  }

  double accuracy(const Matrix& features, const std::vector<int>& labels) const {
    int correct = 0;
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      if (predict(features.row(i).transpose()) == labels[size_t(i)]) ++correct;
    }
    return double(correct) / double(features.rows());
  }
};

inline Matrix feature_matrix(const std::vector<const TrialMatrix*>& trials,
                             const BandCovFeatures& extract, double fs) {
  if (trials.empty()) return Matrix(0, 0);
  const Vector first = extract(*trials.front(), fs);
  Matrix out(Eigen::Index(trials.size()), first.size());
  out.row(0) = first.transpose();
  for (size_t i = 1; i < trials.size(); ++i) {
    out.row(Eigen::Index(i)) = extract(*trials[i], fs).transpose();
  }
  return out;
}

}  // namespace easr::oracle
