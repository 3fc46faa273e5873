// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/synthgen.hpp"

#include <cmath>
#include <string>

#include "easr/rng.hpp"

namespace easr {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Source-model constants, calibrated so that a regularized linear decoder on
// band-covariance features reproduces the designed transfer behavior
// (within-subject >= 0.9, cross-subject <= 0.65 without alignment, >= 0.8
// with): weak class signal, dominant in-band background rhythms.
constexpr double kClassOscVariance = 0.45;
constexpr double kInterferenceTotalVariance = 20.0;
constexpr int kInterferenceCount = 4;
constexpr double kInterferenceFreqs[kInterferenceCount] = {8.5, 11.5, 20.5, 23.5};
constexpr double kInterferenceAmpJitterLo = 0.25;
constexpr double kInterferenceAmpJitterHi = 1.75;
constexpr double kSubjectGainLogRange = 1.0;   // gain = exp(U(-r, r))
constexpr int kSubjectRotationPlanes = 3;
constexpr double kSubjectRotationMax = 0.15;   // radians per plane
constexpr double kSessionRotationMax = 0.08;
constexpr int kPinkWarmup = 128;

// rng stream tags
constexpr uint64_t kTagDataset = 1;
constexpr uint64_t kTagSubject = 2;

// Random rotation composed of `planes` Givens rotations in random planes.
Matrix random_rotation(int dim, int planes, double max_angle, Rng& rng) {
  Matrix r = Matrix::Identity(dim, dim);
  for (int p = 0; p < planes; ++p) {
    const int i = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(dim)));
    int j = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(dim - 1)));
    if (j >= i) ++j;
    const double theta = rng.uniform(0.0, max_angle);
    Matrix g = Matrix::Identity(dim, dim);
    g(i, i) = std::cos(theta);
    g(j, j) = std::cos(theta);
    g(i, j) = -std::sin(theta);
    g(j, i) = std::sin(theta);
    r = g * r;
  }
  return r;
}

// Haar-ish orthonormal basis: QR of a Gaussian matrix, columns sign-fixed by
// the R diagonal.
Matrix random_orthonormal(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

// SPD with eigenvalues log-uniform in [bound^-1/2, bound^1/2]: cond <= bound.
Matrix random_spd(int dim, double condition_bound, Rng& rng) {
  const double half_log = 0.5 * std::log(condition_bound);
  Vector eigenvalues(dim);
  for (int i = 0; i < dim; ++i) eigenvalues(i) = std::exp(rng.uniform(-half_log, half_log));
  const Matrix q = random_orthonormal(dim, rng);
  return q * eigenvalues.asDiagonal() * q.transpose();
}

// Kellet economy pink filter over white noise, normalized to unit sample
// variance per row.
Matrix pink_block(int rows, int cols, Rng& rng) {
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    for (int t = -kPinkWarmup; t < cols; ++t) {
      const double white = rng.normal();
      b0 = 0.99765 * b0 + white * 0.0990460;
      b1 = 0.96300 * b1 + white * 0.2965164;
      b2 = 0.57000 * b2 + white * 1.0526913;
      const double v = b0 + b1 + b2 + white * 0.1848;
      if (t >= 0) out(r, t) = v;
    }
    const double mean = out.row(r).mean();
    out.row(r).array() -= mean;
    const double sd = std::sqrt(out.row(r).squaredNorm() / cols);
    if (sd > 0) out.row(r) /= sd;
  }
  return out;
}

double condition_number(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n_subjects < 1 || n_sessions < 1 || trials_per_class_per_session < 1) {
    fail(ErrorCode::InvalidPlan, "generator counts must be positive");
  }
  if (channel_count < 2 || sample_count < 2 || class_count < 2) {
    fail(ErrorCode::InvalidPlan, "generator needs C >= 2, T >= 2, K >= 2");
  }
  if (static_cast<int>(class_frequencies_hz.size()) < class_count) {
    fail(ErrorCode::InvalidPlan,
         "need one source frequency per class, got " +
             std::to_string(class_frequencies_hz.size()) + " for K = " +
             std::to_string(class_count));
  }
  if (class_count > channel_count) {
    fail(ErrorCode::InvalidPlan, "class patterns exceed available latent dimensions");
  }
  for (double f : class_frequencies_hz) {
    if (!(f > 0.0 && f < 0.5 * sampling_rate_hz)) {
      fail(ErrorCode::InvalidPlan, "class frequency violates Nyquist");
    }
  }
  if (!(snr > 0.0) || !(mixing_condition_bound >= 1.0)) {
    fail(ErrorCode::InvalidPlan, "snr must be positive and condition bound >= 1");
  }
}

std::pair<TrialSet, GroundTruth> generate(const GeneratorConfig& config) {
  config.validate();
  const int c = config.channel_count;
  const int t = config.sample_count;
  const double fs = config.sampling_rate_hz;
  const int k = config.class_count;

  GroundTruth truth;
  truth.class_frequencies_hz.assign(config.class_frequencies_hz.begin(),
                                    config.class_frequencies_hz.begin() + k);
  truth.class_oscillation_variance = kClassOscVariance;
  truth.interference_total_variance = kInterferenceTotalVariance;

  Rng dataset_rng(derive_seed(config.seed, {kTagDataset}));
  truth.latent_basis = random_orthonormal(c, dataset_rng);

  // interference rhythms occupy latent dims K.. as available
  const int n_interf = std::min(kInterferenceCount, c - k);
  for (int i = 0; i < n_interf; ++i) {
    truth.interference_frequencies_hz.push_back(kInterferenceFreqs[i]);
  }
  const double interf_var_each =
      n_interf > 0 ? kInterferenceTotalVariance / n_interf : 0.0;

  TrialSet set;
  set.class_count = k;
  set.sampling_rate_hz = fs;
  set.trials.reserve(static_cast<size_t>(config.n_subjects) * config.n_sessions * k *
                     config.trials_per_class_per_session);

  Vector time_s(t);
  for (int i = 0; i < t; ++i) time_s(i) = i / fs;

  for (int s = 0; s < config.n_subjects; ++s) {
    Rng rng(derive_seed(config.seed, {kTagSubject, static_cast<uint64_t>(s)}));

    const Matrix h = random_spd(c, config.mixing_condition_bound, rng);
    const Matrix rot = random_rotation(c, kSubjectRotationPlanes, kSubjectRotationMax, rng);
    const double gain = std::exp(rng.uniform(-kSubjectGainLogRange, kSubjectGainLogRange));
    const Matrix base_mixing = gain * (rot * h);
    const double noise_sd = gain / config.snr;

    SubjectGroundTruth sub;
    sub.subject_id = s;
    sub.gain = gain;

    for (int session = 0; session < config.n_sessions; ++session) {
      Matrix mixing = base_mixing;
      if (session > 0) {
        mixing = random_rotation(c, 1, kSessionRotationMax, rng) * base_mixing;
      }
      if (condition_number(mixing) > config.mixing_condition_bound * (1.0 + 1e-9)) {
        fail(ErrorCode::InvalidPlan, "mixing condition bound violated");
      }
      sub.session_mixing.push_back(mixing);

      for (int label = 0; label < k; ++label) {
        const double f_class = config.class_frequencies_hz[size_t(label)];
        for (int rep = 0; rep < config.trials_per_class_per_session; ++rep) {
          Matrix sources = pink_block(c, t, rng);

          const double phase = rng.uniform(0.0, kTwoPi);
          const double amp = std::sqrt(2.0 * kClassOscVariance);
          Eigen::RowVectorXd osc =
              (amp * (kTwoPi * f_class * time_s.array() + phase).sin()).transpose();
          sources += truth.latent_basis.col(label) * osc;

          for (int i = 0; i < n_interf; ++i) {
            const double phi = rng.uniform(0.0, kTwoPi);
            const double jitter =
                rng.uniform(kInterferenceAmpJitterLo, kInterferenceAmpJitterHi);
            const double a = jitter * std::sqrt(2.0 * interf_var_each);
            Eigen::RowVectorXd rhythm =
                (a * (kTwoPi * truth.interference_frequencies_hz[size_t(i)] * time_s.array() +
                      phi)
                         .sin())
                    .transpose();
            sources += truth.latent_basis.col(k + i) * rhythm;
          }

          Matrix x = mixing * sources;
          for (int ch = 0; ch < c; ++ch) {
            for (int ts = 0; ts < t; ++ts) x(ch, ts) += noise_sd * rng.normal();
          }

          LabeledTrial lt;
          lt.trial = TrialMatrix(std::move(x));
          lt.label = label;
          lt.subject_id = s;
          lt.run_id = session;
          set.trials.push_back(std::move(lt));
        }
      }
    }
    truth.subjects.push_back(std::move(sub));
  }

  set.validate();
  return {std::move(set), std::move(truth)};
}

}  // namespace easr
