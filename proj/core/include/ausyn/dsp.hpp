#pragma once

#include <span>
#include <vector>

#include "ausyn/signal.hpp"

namespace ausyn {

// EMG conditioning parameters. filter_order is the analog prototype order;
// the band-pass realization therefore carries 2x that many poles.
struct PreprocessConfig {
  double ramp_s = 0.5;
  double bandpass_low_hz = 15.0;
  double bandpass_high_hz = 490.0;
  double lowpass_hz = 4.0;
  int filter_order = 4;
};

struct SgConfig {
  int polynomial_order = 1;
  int window = 301;  // samples, odd
};

// One second-order section, direct form II transposed, a0 normalized to 1.
struct Biquad {
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};
using SosChain = std::vector<Biquad>;

// Butterworth designs via the bilinear transform with pre-warped edges, so
// the -3 dB points land exactly on the requested frequencies.
SosChain butterworth_lowpass(int order, double cutoff_hz, double rate_hz);
SosChain butterworth_bandpass(int order, double low_hz, double high_hz,
                              double rate_hz);

// |H(e^{j 2 pi f / fs})| of the cascade.
double sos_magnitude(const SosChain& sos, double freq_hz, double rate_hz);

// Single forward pass, zero initial state.
std::vector<double> sosfilt(const SosChain& sos, std::span<const double> x);

// Forward-backward pass with odd-reflection padding and steady-state initial
// conditions per section; zero phase, squared magnitude.
std::vector<double> sosfiltfilt(const SosChain& sos, std::span<const double> x);

// Half-Hann tapers over the first and last ramp_s seconds. Requires the ramp
// to fit twice into the recording.
Recording apply_ramp_window(const Recording& rec, double ramp_s);

// First half of the conditioning chain: ramp tapers, then per channel linear
// detrend, z-scoring (skipped for zero-variance channels), and a zero-phase
// band-pass.
Recording bandpass_emg(const Recording& rec, const PreprocessConfig& cfg = {});

// Full conditioning chain: bandpass_emg, then rectification, zero-phase
// low-pass, and clipping of residual negatives. The result is a non-negative
// envelope per channel.
Recording preprocess_emg(const Recording& rec,
                         const PreprocessConfig& cfg = {});

// Rectify and low-pass an already band-passed recording into an envelope.
Recording envelope_emg(const Recording& rec, const PreprocessConfig& cfg = {});

// Least-squares polynomial smoothing evaluated at the window center. Edge
// samples use symmetrically shrunk windows (and a correspondingly reduced
// polynomial order when the window gets too small).
std::vector<double> savitzky_golay(std::span<const double> series,
                                   const SgConfig& cfg);

}  // namespace ausyn
