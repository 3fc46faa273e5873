// Copyright 2026 the easr authors
// SPDX-License-Identifier: Apache-2.0

#include "easr/preprocess.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace easr {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Complexd = std::complex<double>;

// Denominator coefficients of the biquad holding the conjugate pole pair (z, z*).
void pole_pair_to_denominator(const Complexd& z, Biquad& q) {
  q.a1 = -2.0 * z.real();
  q.a2 = std::norm(z);
}

void real_pole_pair_to_denominator(double z1, double z2, Biquad& q) {
  q.a1 = -(z1 + z2);
  q.a2 = z1 * z2;
}

Complexd bilinear(const Complexd& s, double fs2) {
  return (fs2 + s) / (fs2 - s);
}

double sos_magnitude(const std::vector<Biquad>& sos, double omega) {
  Complexd z = std::exp(Complexd(0.0, -omega));
  Complexd h(1.0, 0.0);
  for (const Biquad& q : sos) {
    h *= (q.b0 + q.b1 * z + q.b2 * z * z) / (1.0 + q.a1 * z + q.a2 * z * z);
  }
  return std::abs(h);
}

}  // namespace

void PreprocessConfig::validate(double sampling_rate_hz) const {
  if (filter_order <= 0 || filter_order % 2 != 0) {
    fail(ErrorCode::InvalidBand,
         "filter_order must be a positive even integer, got " + std::to_string(filter_order));
  }
  if (!(band_low_hz > 0.0) || !(band_low_hz < band_high_hz) ||
      !(band_high_hz < 0.5 * sampling_rate_hz)) {
    fail(ErrorCode::InvalidBand,
         "band [" + std::to_string(band_low_hz) + ", " + std::to_string(band_high_hz) +
             "] Hz invalid for sampling rate " + std::to_string(sampling_rate_hz));
  }
  if (!(ems_factor_new > 0.0 && ems_factor_new < 1.0)) {
    fail(ErrorCode::InvalidBand, "ems_factor_new must lie in (0, 1)");
  }
  if (!(ems_eps > 0.0)) {
    fail(ErrorCode::InvalidBand, "ems_eps must be positive");
  }
}

std::vector<Biquad> butterworth_bandpass(int order, double low_hz, double high_hz,
                                         double sampling_rate_hz) {
  if (order <= 0 || order % 2 != 0) {
    fail(ErrorCode::InvalidBand, "band-pass order must be even and positive");
  }
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < 0.5 * sampling_rate_hz)) {
    fail(ErrorCode::InvalidBand, "band edges violate Nyquist constraints");
  }
  const int n = order / 2;  // analog low-pass prototype order
  const double fs2 = 2.0 * sampling_rate_hz;
  const double w1 = fs2 * std::tan(kPi * low_hz / sampling_rate_hz);
  const double w2 = fs2 * std::tan(kPi * high_hz / sampling_rate_hz);
  const double w0 = std::sqrt(w1 * w2);
  const double bw = w2 - w1;

  std::vector<Biquad> sos;
  sos.reserve(n);

  // Each prototype pole p maps to the roots of s^2 - p*bw*s + w0^2. Upper-half
  // prototype poles contribute both roots (conjugates arrive from the skipped
  // mirror pole); a real prototype pole (odd n) yields a conjugate or real pair.
  for (int k = 0; k < n; ++k) {
    const double theta = kPi * (2.0 * k + n + 1.0) / (2.0 * n);
    Complexd p(std::cos(theta), std::sin(theta));
    if (p.imag() < -1e-12) continue;  // conjugate of an already-handled pole

    const Complexd pb = p * bw;
    const Complexd disc = std::sqrt(pb * pb - 4.0 * w0 * w0);
    const Complexd s_plus = 0.5 * (pb + disc);
    const Complexd s_minus = 0.5 * (pb - disc);

    if (p.imag() > 1e-12) {
      for (const Complexd& s : {s_plus, s_minus}) {
        Biquad q;
        pole_pair_to_denominator(bilinear(s, fs2), q);
        q.b0 = 1.0;
        q.b1 = 0.0;
        q.b2 = -1.0;  // zeros at z = +1 and z = -1
        sos.push_back(q);
      }
    } else {
      // real prototype pole: s_plus/s_minus are either conjugates or both real
      Biquad q;
      Complexd z1 = bilinear(s_plus, fs2);
      Complexd z2 = bilinear(s_minus, fs2);
      if (std::abs(z1.imag()) > 1e-12) {
        pole_pair_to_denominator(z1, q);
      } else {
        real_pole_pair_to_denominator(z1.real(), z2.real(), q);
      }
      q.b0 = 1.0;
      q.b1 = 0.0;
      q.b2 = -1.0;
      sos.push_back(q);
    }
  }

  // Normalize to unit gain at the digital center frequency.
  const double omega_c = 2.0 * std::atan(w0 / fs2);
  const double g = sos_magnitude(sos, omega_c);
  const double correction = 1.0 / g;
  sos.front().b0 *= correction;
  sos.front().b1 *= correction;
  sos.front().b2 *= correction;
  return sos;
}

namespace {

// Steady-state DF2T state for a constant unit input (lfilter_zi analogue).
void section_zi(const Biquad& q, double& z1, double& z2) {
  const double h = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
  z2 = q.b2 - q.a2 * h;
  z1 = q.b1 - q.a1 * h + z2;
}

void sosfilt_forward(const std::vector<Biquad>& sos, std::vector<double>& x) {
  double level = 1.0;  // DC gain accumulated over preceding sections
  for (const Biquad& q : sos) {
    double z1_unit, z2_unit;
    section_zi(q, z1_unit, z2_unit);
    double z1 = z1_unit * level * x.front();
    double z2 = z2_unit * level * x.front();
    // level tracking uses the section's DC gain so the next section's initial
    // state matches its steady-state input
    level *= (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    for (double& v : x) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
  }
}

}  // namespace

void filtfilt(const std::vector<Biquad>& sos,
              Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> x) {
  const int n = static_cast<int>(x.size());
  int padlen = 3 * 2 * static_cast<int>(sos.size());
  if (padlen >= n) padlen = n - 1;

  std::vector<double> ext;
  ext.reserve(n + 2 * padlen);
  for (int i = padlen; i >= 1; --i) ext.push_back(2.0 * x(0) - x(i));
  for (int i = 0; i < n; ++i) ext.push_back(x(i));
  for (int i = 1; i <= padlen; ++i) ext.push_back(2.0 * x(n - 1) - x(n - 1 - i));

  sosfilt_forward(sos, ext);
  std::reverse(ext.begin(), ext.end());
  sosfilt_forward(sos, ext);
  std::reverse(ext.begin(), ext.end());

  for (int i = 0; i < n; ++i) x(i) = ext[size_t(padlen) + i];
}

TrialSet rescale_v_to_uv(const TrialSet& set) {
  TrialSet out = set;
  for (LabeledTrial& lt : out.trials) lt.trial.data *= 1e6;
  return out;
}

TrialSet bandpass(const TrialSet& set, const PreprocessConfig& cfg) {
  cfg.validate(set.sampling_rate_hz);
  const std::vector<Biquad> sos =
      butterworth_bandpass(cfg.filter_order, cfg.band_low_hz, cfg.band_high_hz,
                           set.sampling_rate_hz);
  TrialSet out = set;
  for (LabeledTrial& lt : out.trials) {
    for (int c = 0; c < lt.trial.channel_count(); ++c) {
      filtfilt(sos, lt.trial.data.row(c));
    }
  }
  return out;
}

TrialSet exponential_moving_standardize(const TrialSet& set, const PreprocessConfig& cfg) {
  const double f = cfg.ems_factor_new;
  const double eps = cfg.ems_eps;
  TrialSet out = set;
  for (LabeledTrial& lt : out.trials) {
    Matrix& d = lt.trial.data;
    for (int c = 0; c < d.rows(); ++c) {
      double m = d(c, 0);
      double v = 0.0;
      d(c, 0) = 0.0;
      for (int t = 1; t < d.cols(); ++t) {
        const double x = d(c, t);
        m = f * x + (1.0 - f) * m;
        const double centered = x - m;
        v = f * centered * centered + (1.0 - f) * v;
        d(c, t) = centered / std::max(std::sqrt(v), eps);
      }
    }
  }
  return out;
}

TrialSet preprocess(const TrialSet& set, const PreprocessConfig& cfg) {
  if (set.preprocessed) {
    fail(ErrorCode::AlreadyPreprocessed,
         "preprocessing chain is not idempotent and the set already carries the flag");
  }
  TrialSet out = cfg.rescale_to_microvolts ? rescale_v_to_uv(set) : set;
  out = bandpass(out, cfg);
  out = exponential_moving_standardize(out, cfg);
  out.preprocessed = true;
  return out;
}

}  // namespace easr
