// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "easr/core.hpp"
#include "easr/rng.hpp"
#include "support/oracles.hpp"

using namespace easr;

TEST_CASE("trial_covariance of identity-like trial") {
  Matrix x(2, 2);
  x << 1, 0, 0, 1;
  const SpdMatrix cov = trial_covariance(TrialMatrix(x));
  CHECK(cov.data.isApprox(Matrix::Identity(2, 2)));
}

TEST_CASE("trial_covariance direct 2x2") {
  Matrix x(2, 2);
  x << 1, 1, 0, 0;
  const SpdMatrix cov = trial_covariance(TrialMatrix(x));
  Matrix expected(2, 2);
  expected << 2, 0, 0, 0;
  CHECK(cov.data.isApprox(expected));
}

TEST_CASE("trial_covariance matches brute-force Gram oracle") {
  Rng rng(7);
  const Matrix x = oracle::random_matrix(4, 64, rng);
  const SpdMatrix cov = trial_covariance(TrialMatrix(x));
  const Matrix expected = oracle::brute_force_gram(x);
  CHECK((cov.data - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trial_covariance rejects non-finite input") {
  Matrix x = Matrix::Ones(2, 3);
  TrialMatrix trial(x);
  trial.data(1, 1) = std::nan("");
  CHECK_THROWS_WITH_AS(trial_covariance(trial), doctest::Contains("InvalidSignal"), Error);
}

TEST_CASE("trial matrix shape and finiteness invariants") {
  CHECK_THROWS_AS(TrialMatrix(Matrix::Ones(1, 5)), Error);
  CHECK_THROWS_AS(TrialMatrix(Matrix::Ones(5, 1)), Error);
  Matrix bad = Matrix::Ones(3, 3);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(TrialMatrix(bad), Error);
}

TEST_CASE("eig_symmetric on diag(3,1)") {
  Matrix m(2, 2);
  m << 3, 0, 0, 1;
  const SymmetricEigen eig = eig_symmetric(SpdMatrix(m));
  CHECK(eig.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(eig.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("eig_symmetric textbook 2x2") {
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  const SymmetricEigen eig = eig_symmetric(SpdMatrix(m));
  CHECK(eig.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(eig.eigenvalues(1) == doctest::Approx(1.0));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  // first eigenvector is (1,1)/sqrt(2) up to sign
  CHECK(std::abs(eig.eigenvectors(0, 0)) == doctest::Approx(inv_sqrt2));
  CHECK(eig.eigenvectors(0, 0) == doctest::Approx(eig.eigenvectors(1, 0)));
  // second is (1,-1)/sqrt(2) up to sign
  CHECK(eig.eigenvectors(0, 1) == doctest::Approx(-eig.eigenvectors(1, 1)));
}

TEST_CASE("eig_symmetric reconstruction and orthonormality on random SPD 8x8") {
  Rng rng(11);
  const Matrix m = oracle::random_spd(8, rng);
  const SymmetricEigen eig = eig_symmetric(SpdMatrix(m));

  const Matrix rebuilt =
      eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.transpose();
  const double scale = m.cwiseAbs().maxCoeff();
  CHECK((rebuilt - m).cwiseAbs().maxCoeff() < 1e-9 * scale);

  const Matrix vtv = eig.eigenvectors.transpose() * eig.eigenvectors;
  CHECK((vtv - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);

  for (int i = 1; i < eig.eigenvalues.size(); ++i) {
    CHECK(eig.eigenvalues(i - 1) >= eig.eigenvalues(i));
  }
}

TEST_CASE("eig_symmetric rejects non-symmetric input") {
  SpdMatrix m(Matrix::Identity(3, 3));
  m.data(0, 2) = 0.5;  // break symmetry behind the constructor's back
  CHECK_THROWS_WITH_AS(eig_symmetric(m), doctest::Contains("NotSymmetric"), Error);
}

TEST_CASE("inv_sqrtm identity") {
  const SpdMatrix r = inv_sqrtm(SpdMatrix(Matrix::Identity(4, 4)));
  CHECK(r.data.isApprox(Matrix::Identity(4, 4)));
}

TEST_CASE("inv_sqrtm diag(4,9)") {
  Matrix m(2, 2);
  m << 4, 0, 0, 9;
  const SpdMatrix r = inv_sqrtm(SpdMatrix(m));
  CHECK(r.data(0, 0) == doctest::Approx(0.5));
  CHECK(r.data(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(r.data(0, 1)) < 1e-14);
}

TEST_CASE("inv_sqrtm defining property R*M*R = I") {
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  const SpdMatrix r = inv_sqrtm(SpdMatrix(m));
  const Matrix check = r.data * m * r.data;
  CHECK((check - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("inv_sqrtm whitening property on random SPD matrices") {
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix m = oracle::random_spd(6, rng);
    const SpdMatrix r = inv_sqrtm(SpdMatrix(m));
    const Matrix check = r.data * m * r.data;
    CHECK((check - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(is_symmetric(r.data));
  }
}

TEST_CASE("inv_sqrtm degenerate covariance") {
  CHECK_THROWS_WITH_AS(inv_sqrtm(SpdMatrix(Matrix::Zero(3, 3))),
                       doctest::Contains("DegenerateCovariance"), Error);
  // rank-deficient input survives thanks to the relative floor
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 4.0;
  CHECK_NOTHROW(inv_sqrtm(SpdMatrix(m)));
  // but an explicit zero floor rejects it
  CHECK_THROWS_WITH_AS(inv_sqrtm(SpdMatrix(m), 0.0),
                       doctest::Contains("DegenerateCovariance"), Error);
}

TEST_CASE("trial_covariance is positive semidefinite") {
  Rng rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix x = oracle::random_matrix(5, 3, rng);  // rank-deficient Gram
    const SymmetricEigen eig = eig_symmetric(trial_covariance(TrialMatrix(x)));
    const double lambda_max = eig.eigenvalues(0);
    CHECK(eig.eigenvalues(eig.eigenvalues.size() - 1) >= -1e-10 * lambda_max);
  }
}

TEST_CASE("trial set validation") {
  TrialSet set;
  set.class_count = 2;
  set.sampling_rate_hz = 100.0;
  set.trials.push_back({TrialMatrix(Matrix::Ones(3, 4)), 0, 0, 0});
  set.trials.push_back({TrialMatrix(Matrix::Ones(3, 4)), 1, 0, 0});
  CHECK_NOTHROW(set.validate());

  set.trials.push_back({TrialMatrix(Matrix::Ones(2, 4)), 0, 0, 0});
  CHECK_THROWS_WITH_AS(set.validate(), doctest::Contains("DimensionMismatch"), Error);
  set.trials.pop_back();

  set.trials.push_back({TrialMatrix(Matrix::Ones(3, 4)), 2, 0, 0});
  CHECK_THROWS_WITH_AS(set.validate(), doctest::Contains("InvalidLabel"), Error);
}
