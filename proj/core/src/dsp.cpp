#include "ausyn/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace ausyn {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Left-half-plane poles of the unit-cutoff analog Butterworth prototype.
std::vector<cplx> prototype_poles(int order) {
  std::vector<cplx> poles;
  poles.reserve(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    const double theta = kPi * (2.0 * k + order + 1.0) / (2.0 * order);
    poles.emplace_back(std::cos(theta), std::sin(theta));
  }
  return poles;
}

cplx bilinear(cplx s, double fs2) { return (fs2 + s) / (fs2 - s); }

// Denominator coefficients from a pole pair (conjugates, or two reals).
void pole_pair_denominator(cplx z1, cplx z2, Biquad& s) {
  s.a1 = -(z1 + z2).real();
  s.a2 = (z1 * z2).real();
}

cplx biquad_response(const Biquad& s, double omega) {
  const cplx z1 = std::polar(1.0, -omega);
  const cplx z2 = z1 * z1;
  return (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
}

void check_rate(double rate_hz) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
    throw InvalidArgumentError("sampling rate must be positive and finite");
  }
}

std::vector<double> detrend_linear(std::span<const double> x) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<double> out(x.begin(), x.end());
  if (n < 2) {
    if (n == 1) out[0] = 0.0;
    return out;
  }
  // Least-squares line over t = 0..n-1.
  const double tm = 0.5 * static_cast<double>(n - 1);
  double sy = 0.0, sty = 0.0, stt = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i) - tm;
    sy += x[static_cast<std::size_t>(i)];
    sty += dt * x[static_cast<std::size_t>(i)];
    stt += dt * dt;
  }
  const double mean = sy / static_cast<double>(n);
  const double slope = stt > 0.0 ? sty / stt : 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] -=
        mean + slope * (static_cast<double>(i) - tm);
  }
  return out;
}

// In-place z-score with sample standard deviation. Zero-variance input stays
// centered at zero instead of dividing by zero.
void zscore(std::vector<double>& x) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) {
    for (auto& v : x) v = 0.0;
    return;
  }
  double mean = 0.0;
  for (const double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (const double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  for (auto& v : x) v -= mean;
  if (sd > 0.0) {
    for (auto& v : x) v /= sd;
  }
}

double dc_gain(const Biquad& s) {
  return (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
}

// One section over the whole buffer, direct form II transposed.
void run_biquad(const Biquad& s, std::vector<double>& x, double z1, double z2) {
  for (auto& v : x) {
    const double in = v;
    const double out = s.b0 * in + z1;
    z1 = s.b1 * in - s.a1 * out + z2;
    z2 = s.b2 * in - s.a2 * out;
    v = out;
  }
}

// Steady-state (unit step) initial conditions for one section.
void step_state(const Biquad& s, double& z1, double& z2) {
  const double g = dc_gain(s);
  z1 = s.b1 + s.b2 - (s.a1 + s.a2) * g;
  z2 = s.b2 - s.a2 * g;
}

// Forward pass with per-section steady-state states scaled to the first
// input sample. Matches the usual filtfilt initialization.
void sosfilt_steady(const SosChain& sos, std::vector<double>& x) {
  if (x.empty()) return;
  double scale = x.front();
  for (const auto& s : sos) {
    double z1 = 0.0, z2 = 0.0;
    step_state(s, z1, z2);
    run_biquad(s, x, z1 * scale, z2 * scale);
    scale *= dc_gain(s);
  }
}

}  // namespace

SosChain butterworth_lowpass(int order, double cutoff_hz, double rate_hz) {
  check_rate(rate_hz);
  if (order < 1) throw InvalidArgumentError("filter order must be >= 1");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= 0.5 * rate_hz) {
    throw InvalidArgumentError("low-pass cutoff must lie in (0, rate/2)");
  }
  const double fs2 = 2.0 * rate_hz;
  const double wc = fs2 * std::tan(kPi * cutoff_hz / rate_hz);

  SosChain sos;
  const auto poles = prototype_poles(order);
  for (const auto& p : poles) {
    if (p.imag() > 1e-12) {
      const cplx zp = bilinear(p * wc, fs2);
      Biquad s;
      pole_pair_denominator(zp, std::conj(zp), s);
      const double g = (1.0 + s.a1 + s.a2) / 4.0;  // unit DC gain
      s.b0 = g;
      s.b1 = 2.0 * g;
      s.b2 = g;
      sos.push_back(s);
    } else if (std::abs(p.imag()) <= 1e-12) {
      // Real pole of an odd-order design, first-order section.
      const cplx zp = bilinear(p * wc, fs2);
      Biquad s;
      s.a1 = -zp.real();
      s.a2 = 0.0;
      const double g = (1.0 + s.a1) / 2.0;
      s.b0 = g;
      s.b1 = g;
      s.b2 = 0.0;
      sos.push_back(s);
    }
  }
  return sos;
}

SosChain butterworth_bandpass(int order, double low_hz, double high_hz,
                              double rate_hz) {
  check_rate(rate_hz);
  if (order < 1) throw InvalidArgumentError("filter order must be >= 1");
  if (!(low_hz > 0.0) || !(high_hz > low_hz) || high_hz >= 0.5 * rate_hz) {
    throw InvalidArgumentError(
        "band edges must satisfy 0 < low < high < rate/2");
  }
  const double fs2 = 2.0 * rate_hz;
  const double w1 = fs2 * std::tan(kPi * low_hz / rate_hz);
  const double w2 = fs2 * std::tan(kPi * high_hz / rate_hz);
  const double w0 = std::sqrt(w1 * w2);
  const double bw = w2 - w1;
  // Frequency the pre-warped center maps back to on the unit circle.
  const double omega0 = 2.0 * std::atan(w0 / fs2);

  SosChain sos;
  auto add_section = [&](cplx z1, cplx z2) {
    Biquad s;
    pole_pair_denominator(z1, z2, s);
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;  // one zero at z=1, one at z=-1
    const double mag = std::abs(biquad_response(s, omega0));
    s.b0 /= mag;
    s.b2 /= mag;
    sos.push_back(s);
  };

  // Each prototype pole splits into two band-pass poles:
  //   s = bw*p/2 +- sqrt((bw*p/2)^2 - w0^2)
  for (const auto& p : prototype_poles(order)) {
    if (p.imag() > 1e-12) {
      const cplx half = 0.5 * bw * p;
      const cplx disc = std::sqrt(half * half - w0 * w0);
      const cplx za = bilinear(half + disc, fs2);
      const cplx zb = bilinear(half - disc, fs2);
      add_section(za, std::conj(za));
      add_section(zb, std::conj(zb));
    } else if (std::abs(p.imag()) <= 1e-12) {
      const cplx half = 0.5 * bw * p;
      const cplx disc = std::sqrt(half * half - w0 * w0);
      const cplx za = bilinear(half + disc, fs2);
      const cplx zb = bilinear(half - disc, fs2);
      // The two children of the real pole form one section (complex
      // conjugates, or both real when the band is very wide).
      add_section(za, zb);
    }
  }
  return sos;
}

double sos_magnitude(const SosChain& sos, double freq_hz, double rate_hz) {
  check_rate(rate_hz);
  const double omega = 2.0 * kPi * freq_hz / rate_hz;
  cplx h = 1.0;
  for (const auto& s : sos) h *= biquad_response(s, omega);
  return std::abs(h);
}

std::vector<double> sosfilt(const SosChain& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (const auto& s : sos) run_biquad(s, y, 0.0, 0.0);
  return y;
}

std::vector<double> sosfiltfilt(const SosChain& sos,
                                std::span<const double> x) {
  const auto n = static_cast<std::int64_t>(x.size());
  if (sos.empty() || n == 0) return std::vector<double>(x.begin(), x.end());
  if (n < 2) {
    throw InvalidArgumentError("filtfilt needs at least two samples");
  }
  const auto pad = std::min<std::int64_t>(
      n - 1, 9 * static_cast<std::int64_t>(sos.size()) + 3);

  // Odd reflection about the endpoints damps edge transients.
  std::vector<double> ext;
  ext.reserve(static_cast<std::size_t>(n + 2 * pad));
  for (std::int64_t i = pad; i >= 1; --i) {
    ext.push_back(2.0 * x[0] - x[static_cast<std::size_t>(i)]);
  }
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::int64_t i = 1; i <= pad; ++i) {
    ext.push_back(2.0 * x[static_cast<std::size_t>(n - 1)] -
                  x[static_cast<std::size_t>(n - 1 - i)]);
  }

  sosfilt_steady(sos, ext);
  std::reverse(ext.begin(), ext.end());
  sosfilt_steady(sos, ext);
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + pad, ext.begin() + pad + n);
}

Recording apply_ramp_window(const Recording& rec, double ramp_s) {
  if (!(ramp_s >= 0.0) || !std::isfinite(ramp_s)) {
    throw InvalidArgumentError("ramp must be non-negative and finite");
  }
  const auto ramp = static_cast<Eigen::Index>(
      std::llround(ramp_s * rec.rate_hz()));
  if (2 * ramp > rec.length()) {
    throw InvalidArgumentError("ramp does not fit the recording twice");
  }
  Eigen::MatrixXd out = rec.samples();
  for (Eigen::Index i = 0; i < ramp; ++i) {
    const double arg = std::sin(kPi * static_cast<double>(i) /
                                (2.0 * static_cast<double>(ramp)));
    const double w = arg * arg;  // rising half-Hann
    out.col(i) *= w;
    out.col(rec.length() - 1 - i) *= w;
  }
  return Recording(std::move(out), rec.rate_hz(), rec.channel_names(),
                   rec.start_time_ms());
}

Recording bandpass_emg(const Recording& rec, const PreprocessConfig& cfg) {
  if (cfg.filter_order < 1) {
    throw InvalidArgumentError("filter order must be >= 1");
  }
  if (!(cfg.bandpass_low_hz > 0.0) ||
      !(cfg.bandpass_high_hz > cfg.bandpass_low_hz) ||
      cfg.bandpass_high_hz >= 0.5 * rec.rate_hz()) {
    throw InvalidArgumentError("sampling rate too low for the band edges");
  }

  const Recording ramped = apply_ramp_window(rec, cfg.ramp_s);
  const SosChain bp = butterworth_bandpass(
      cfg.filter_order, cfg.bandpass_low_hz, cfg.bandpass_high_hz,
      rec.rate_hz());

  Eigen::MatrixXd out(rec.channels(), rec.length());
  std::vector<double> chan(static_cast<std::size_t>(rec.length()));
  for (Eigen::Index c = 0; c < rec.channels(); ++c) {
    for (Eigen::Index i = 0; i < rec.length(); ++i) {
      chan[static_cast<std::size_t>(i)] = ramped.samples()(c, i);
    }
    std::vector<double> v = detrend_linear(chan);
    zscore(v);
    v = sosfiltfilt(bp, v);
    for (Eigen::Index i = 0; i < rec.length(); ++i) {
      out(c, i) = v[static_cast<std::size_t>(i)];
    }
  }
  return Recording(std::move(out), rec.rate_hz(), rec.channel_names(),
                   rec.start_time_ms());
}

Recording envelope_emg(const Recording& rec, const PreprocessConfig& cfg) {
  if (cfg.filter_order < 1) {
    throw InvalidArgumentError("filter order must be >= 1");
  }
  if (!(cfg.lowpass_hz > 0.0) || cfg.lowpass_hz >= 0.5 * rec.rate_hz()) {
    throw InvalidArgumentError("envelope cutoff must lie in (0, rate/2)");
  }
  const SosChain lp =
      butterworth_lowpass(cfg.filter_order, cfg.lowpass_hz, rec.rate_hz());

  Eigen::MatrixXd out(rec.channels(), rec.length());
  std::vector<double> chan(static_cast<std::size_t>(rec.length()));
  for (Eigen::Index c = 0; c < rec.channels(); ++c) {
    for (Eigen::Index i = 0; i < rec.length(); ++i) {
      chan[static_cast<std::size_t>(i)] = std::abs(rec.samples()(c, i));
    }
    const std::vector<double> v = sosfiltfilt(lp, chan);
    for (Eigen::Index i = 0; i < rec.length(); ++i) {
      out(c, i) = std::max(0.0, v[static_cast<std::size_t>(i)]);
    }
  }
  return Recording(std::move(out), rec.rate_hz(), rec.channel_names(),
                   rec.start_time_ms());
}

Recording preprocess_emg(const Recording& rec, const PreprocessConfig& cfg) {
  return envelope_emg(bandpass_emg(rec, cfg), cfg);
}

std::vector<double> savitzky_golay(std::span<const double> series,
                                   const SgConfig& cfg) {
  if (cfg.window < 1 || cfg.window % 2 == 0) {
    throw InvalidArgumentError("smoothing window must be odd and positive");
  }
  if (cfg.polynomial_order < 0 || cfg.polynomial_order >= cfg.window) {
    throw InvalidArgumentError("polynomial order must lie in [0, window)");
  }
  const auto n = static_cast<std::int64_t>(series.size());
  if (n < cfg.window) {
    throw InvalidArgumentError("series shorter than the smoothing window");
  }

  const std::int64_t h = cfg.window / 2;
  // Center-evaluation weights per half-width; computed lazily because edges
  // shrink the window symmetrically.
  std::vector<std::vector<double>> weights(static_cast<std::size_t>(h) + 1);
  auto weights_for = [&](std::int64_t hw) -> const std::vector<double>& {
    auto& w = weights[static_cast<std::size_t>(hw)];
    if (!w.empty()) return w;
    const std::int64_t m = 2 * hw + 1;
    const int degree =
        std::min<int>(cfg.polynomial_order, static_cast<int>(m - 1));
    Eigen::MatrixXd a(m, degree + 1);
    for (std::int64_t r = 0; r < m; ++r) {
      double v = 1.0;
      for (int cdeg = 0; cdeg <= degree; ++cdeg) {
        a(r, cdeg) = v;
        v *= static_cast<double>(r - hw);
      }
    }
    // Fitted value at offset 0 is the first coefficient of the LS solution.
    const Eigen::MatrixXd ata = a.transpose() * a;
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(degree + 1);
    e0(0) = 1.0;
    const Eigen::VectorXd first_row = ata.ldlt().solve(e0);
    const Eigen::VectorXd row = a * first_row;
    w.assign(row.data(), row.data() + row.size());
    return w;
  };

  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t hw = std::min({h, i, n - 1 - i});
    const auto& w = weights_for(hw);
    double acc = 0.0;
    for (std::int64_t j = -hw; j <= hw; ++j) {
      acc += w[static_cast<std::size_t>(j + hw)] *
             series[static_cast<std::size_t>(i + j)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace ausyn
