#pragma once

#include "delay_embed/types.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace delay_embed::signals {

// Five-harmonic test signal with period T = 100 (indices 1, 2, 4, 8, 12).
// Sampled at dt = 100 / samples_per_period over n_periods periods.
// samples_per_period must be at least 26 (Nyquist for the highest harmonic).
TimeSeries gen_five_mode(int samples_per_period, int n_periods);

// Closed-form value of the five-harmonic signal at time t.
double five_mode_value(double t);

// Van der Pol oscillator discretized with forward Euler; returns n_steps
// samples starting at x0 (period_samples left unset).
TimeSeries gen_vdp(double mu, std::array<double, 2> x0, double dt, int n_steps);

// x(t) = cos(sqrt(2) t / 2) * sin(sqrt(3) t / 2) * cos(t) at t = k*dt.
TimeSeries gen_quasi_periodic(double dt, int n_steps);
double quasi_periodic_value(double t);

// Adds zero-mean Gaussian noise, per component, with std equal to
// spec.snr_fraction times that component's std. Deterministic given the seed.
TimeSeries add_noise(const TimeSeries& ts, const NoiseSpec& spec);

// Keeps every stride-th sample starting at index 0. Requires period_samples
// set and divisible by stride.
TimeSeries subsample(const TimeSeries& ts, int stride);

// Per-component mean subtraction (over all samples).
TimeSeries subtract_mean(const TimeSeries& ts);

// Samples [start, start + count) of every component.
TimeSeries segment(const TimeSeries& ts, int start, int count,
                   std::optional<int> period_samples = std::nullopt);

// Synthetic high-dimensional series for the HODMD experiments: a known set of
// unit-modulus latent waves observed through a random linear map, plus a bank
// of weak background waves. strong_freqs reports the latent frequencies
// (radians per step); their conjugate pairs are the eigenvalues a correct
// modal decomposition must recover.
struct ModalSurrogate {
  TimeSeries series;
  std::vector<double> strong_freqs;
};
ModalSurrogate gen_modal_surrogate(int n_channels, int n_snapshots,
                                   int n_strong, int n_weak,
                                   double weak_amplitude, std::uint64_t seed);

// Deterministic Gaussian stream (mt19937_64 + Box-Muller). The engine's
// output sequence is pinned by the standard; the uniform and Gaussian
// transforms are spelled out here so fixtures reproduce bit-exactly across
// platforms (std::normal_distribution is implementation-defined).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  double next();
  double uniform01();  // in (0, 1]

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace delay_embed::signals
