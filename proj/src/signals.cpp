#include "delay_embed/signals.hpp"

#include <cmath>
#include <numbers>

namespace delay_embed::signals {

namespace {
constexpr double kPi = std::numbers::pi;
}

double five_mode_value(double t) {
  return 0.3 * std::cos(2.0 * kPi * t / 100.0) +
         0.5 * std::sin(4.0 * kPi * t / 100.0) +
         0.9 * std::cos(8.0 * kPi * t / 100.0) +
         1.6 * std::sin(16.0 * kPi * t / 100.0) +
         1.2 * std::cos(24.0 * kPi * t / 100.0);
}

TimeSeries gen_five_mode(int samples_per_period, int n_periods) {
  detail::require(samples_per_period >= 26,
                  "gen_five_mode: fewer than 26 samples per period aliases the "
                  "highest harmonic (index 12)");
  detail::require(n_periods >= 1, "gen_five_mode: n_periods must be positive");
  const double dt = 100.0 / samples_per_period;
  const int n = samples_per_period * n_periods;
  TimeSeries ts;
  ts.data.resize(1, n);
  for (int k = 0; k < n; ++k) ts.data(0, k) = five_mode_value(k * dt);
  ts.dt = dt;
  ts.period_samples = samples_per_period;
  return ts;
}

TimeSeries gen_vdp(double mu, std::array<double, 2> x0, double dt, int n_steps) {
  detail::require(dt > 0.0, "gen_vdp: dt must be positive");
  detail::require(n_steps >= 1, "gen_vdp: n_steps must be positive");
  TimeSeries ts;
  ts.data.resize(2, n_steps);
  double x1 = x0[0], x2 = x0[1];
  for (int k = 0; k < n_steps; ++k) {
    ts.data(0, k) = x1;
    ts.data(1, k) = x2;
    const double x1n = x1 + dt * x2;
    const double x2n = x2 + dt * (mu * (1.0 - x1 * x1) * x2 - x1);
    x1 = x1n;
    x2 = x2n;
  }
  ts.dt = dt;
  return ts;
}

double quasi_periodic_value(double t) {
  return std::cos(std::sqrt(2.0) * t / 2.0) * std::sin(std::sqrt(3.0) * t / 2.0) *
         std::cos(t);
}

TimeSeries gen_quasi_periodic(double dt, int n_steps) {
  detail::require(dt > 0.0, "gen_quasi_periodic: dt must be positive");
  detail::require(n_steps >= 1, "gen_quasi_periodic: n_steps must be positive");
  TimeSeries ts;
  ts.data.resize(1, n_steps);
  for (int k = 0; k < n_steps; ++k) ts.data(0, k) = quasi_periodic_value(k * dt);
  ts.dt = dt;
  return ts;
}

double GaussianStream::uniform01() {
  // 53-bit mantissa in (0, 1]; the shift keeps the transform exactly
  // reproducible for a given engine sequence.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1p-53;
}

double GaussianStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

TimeSeries add_noise(const TimeSeries& ts, const NoiseSpec& spec) {
  validate(ts);
  detail::require(spec.snr_fraction >= 0.0, "add_noise: snr_fraction must be >= 0");
  TimeSeries out = ts;
  if (spec.snr_fraction == 0.0) return out;
  GaussianStream g(spec.seed);
  const int n = ts.samples();
  for (int j = 0; j < ts.components(); ++j) {
    const double mean = ts.data.row(j).mean();
    const double var = (ts.data.row(j).array() - mean).square().sum() / n;
    const double sigma = spec.snr_fraction * std::sqrt(var);
    for (int k = 0; k < n; ++k) out.data(j, k) += sigma * g.next();
  }
  return out;
}

TimeSeries subsample(const TimeSeries& ts, int stride) {
  validate(ts);
  detail::require(stride >= 1, "subsample: stride must be positive");
  detail::require(ts.period_samples.has_value(),
                  "subsample: period_samples must be declared");
  detail::require(*ts.period_samples % stride == 0,
                  "subsample: stride must divide period_samples");
  const int n = (ts.samples() + stride - 1) / stride;
  TimeSeries out;
  out.data.resize(ts.components(), n);
  for (int k = 0; k < n; ++k) out.data.col(k) = ts.data.col(k * stride);
  out.dt = ts.dt * stride;
  out.period_samples = *ts.period_samples / stride;
  return out;
}

TimeSeries subtract_mean(const TimeSeries& ts) {
  validate(ts);
  TimeSeries out = ts;
  for (int j = 0; j < ts.components(); ++j)
    out.data.row(j).array() -= ts.data.row(j).mean();
  return out;
}

TimeSeries segment(const TimeSeries& ts, int start, int count,
                   std::optional<int> period_samples) {
  validate(ts);
  detail::require(start >= 0 && count >= 1 && start + count <= ts.samples(),
                  "segment: range out of bounds");
  TimeSeries out;
  out.data = ts.data.middleCols(start, count);
  out.dt = ts.dt;
  out.period_samples = period_samples;
  if (period_samples) validate(out);
  return out;
}

ModalSurrogate gen_modal_surrogate(int n_channels, int n_snapshots, int n_strong,
                                   int n_weak, double weak_amplitude,
                                   std::uint64_t seed) {
  detail::require(n_channels >= 1 && n_snapshots >= 2, "gen_modal_surrogate: bad shape");
  detail::require(n_strong >= 1 && n_weak >= 0, "gen_modal_surrogate: bad wave counts");
  GaussianStream g(seed);

  // Strong waves: sorted random frequencies in a low band; weak waves: a
  // jittered grid in a disjoint higher band, so the latent subspace stays
  // numerically full rank over short training windows.
  std::vector<double> strong(n_strong), weak(n_weak);
  for (auto& f : strong) f = 0.08 + (1.2 - 0.08) * g.uniform01();
  std::sort(strong.begin(), strong.end());
  const double lo = 1.35, hi = 2.9;
  const double step = n_weak > 1 ? (hi - lo) / (n_weak - 1) : 0.0;
  for (int i = 0; i < n_weak; ++i)
    weak[i] = lo + step * i + step * 0.2 * (2.0 * g.uniform01() - 1.0);

  const int n_lat = 2 * (n_strong + n_weak);
  MatrixXd latent(n_lat, n_snapshots);
  std::vector<double> phase(n_strong + n_weak), amp(n_strong + n_weak);
  for (int i = 0; i < n_strong + n_weak; ++i) {
    phase[i] = 2.0 * kPi * g.uniform01();
    amp[i] = i < n_strong ? 1.0 : weak_amplitude * (0.5 + 0.5 * g.uniform01());
  }
  for (int i = 0; i < n_strong + n_weak; ++i) {
    const double f = i < n_strong ? strong[i] : weak[i - n_strong];
    for (int k = 0; k < n_snapshots; ++k) {
      latent(2 * i, k) = amp[i] * std::cos(f * k + phase[i]);
      latent(2 * i + 1, k) = amp[i] * std::sin(f * k + phase[i]);
    }
  }
  MatrixXd mix(n_channels, n_lat);
  for (int r = 0; r < n_channels; ++r)
    for (int c = 0; c < n_lat; ++c) mix(r, c) = g.next();

  ModalSurrogate out;
  out.series.data = mix * latent;
  out.series.dt = 1.0;
  out.strong_freqs = strong;
  return out;
}

}  // namespace delay_embed::signals
