#include "delay_embed/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace delay_embed::spectral {

FourierSpectrum dft(const TimeSeries& ts, int component) {
  validate(ts);
  detail::require(ts.period_samples.has_value(), "dft: period_samples must be declared");
  detail::require(component >= 0 && component < ts.components(),
                  "dft: component out of range");
  const int m = *ts.period_samples;

  // Table of e^{-2*pi*i*r/m}; indices reduced mod m keep conjugate bins exact
  // mirrors of each other.
  std::vector<cplx> root(m);
  for (int r = 0; r < m; ++r) root[r] = unit_root(m, r);

  FourierSpectrum spec;
  spec.M = m;
  spec.coeffs.resize(m);
  for (int i = 0; i < m; ++i) {
    cplx acc(0.0, 0.0);
    for (int k = 0; k < m; ++k) {
      // e^{+2*pi*i*k*i/m} == conj(root[k*i mod m])
      const long long r = (static_cast<long long>(k) * i) % m;
      acc += ts.data(component, k) * std::conj(root[static_cast<int>(r)]);
    }
    spec.coeffs(i) = acc / static_cast<double>(m);
  }
  return spec;
}

double reconstruct(const FourierSpectrum& spec, double t_over_T) {
  const int m = spec.M;
  // Bins above M/2 are the negative frequencies of the real interpolant;
  // folding them keeps the off-grid evaluation real for symmetric spectra
  // and leaves the on-grid values untouched. The self-conjugate bin (even M)
  // contributes a pure cosine.
  cplx acc(0.0, 0.0);
  for (int i = 0; i < m; ++i) {
    if (m % 2 == 0 && i == m / 2) {
      acc += spec.coeffs(i) *
             std::cos(2.0 * std::numbers::pi * (m / 2) * t_over_T);
      continue;
    }
    const int f = i <= m / 2 ? i : i - m;
    const double ang = -2.0 * std::numbers::pi * f * t_over_T;
    acc += spec.coeffs(i) * std::polar(1.0, ang);
  }
  const double scale = spec.coeffs.cwiseAbs().sum();
  if (std::abs(acc.imag()) > 1e-10 * std::max(scale, 1e-300))
    throw std::runtime_error("reconstruct: imaginary residue exceeds tolerance "
                             "(spectrum is not conjugate-symmetric)");
  return acc.real();
}

TimeSeries synthesize(const FourierSpectrum& spec, int n_samples, double dt) {
  detail::require(n_samples >= 1, "synthesize: n_samples must be positive");
  const int m = spec.M;
  std::vector<cplx> root(m);
  for (int r = 0; r < m; ++r) root[r] = unit_root(m, r);
  const double scale = spec.coeffs.cwiseAbs().sum();

  TimeSeries ts;
  ts.data.resize(1, n_samples);
  for (int k = 0; k < n_samples; ++k) {
    cplx acc(0.0, 0.0);
    for (int i = 0; i < m; ++i) {
      const long long r = (static_cast<long long>(k) * i) % m;
      acc += spec.coeffs(i) * root[static_cast<int>(r)];
    }
    if (std::abs(acc.imag()) > 1e-10 * std::max(scale, 1e-300))
      throw std::runtime_error("synthesize: imaginary residue exceeds tolerance");
    ts.data(0, k) = acc.real();
  }
  ts.dt = dt;
  ts.period_samples = m;
  return ts;
}

SparsityPattern detect_sparsity(const FourierSpectrum& spec, double rel_threshold) {
  detail::require(rel_threshold >= 0.0 && rel_threshold < 1.0,
                  "detect_sparsity: rel_threshold must lie in [0, 1)");
  const int m = spec.M;
  const double amax = spec.coeffs.cwiseAbs().maxCoeff();
  SparsityPattern pat;
  pat.threshold_used = rel_threshold;
  if (amax == 0.0) return pat;

  std::set<int> keep;
  for (int i = 0; i < m; ++i) {
    if (std::abs(spec.coeffs(i)) > rel_threshold * amax) {
      keep.insert(i);
      keep.insert((m - i) % m);
    }
  }
  pat.indices.assign(keep.begin(), keep.end());
  return pat;
}

int min_subsample(const SparsityPattern& pattern, int M) {
  detail::require(!pattern.indices.empty(), "min_subsample: empty pattern");
  detail::require(M % 2 == 0, "min_subsample: M must be even");
  int largest_first_half = -1;
  for (int i : pattern.indices) {
    detail::require(i >= 0 && i < M, "min_subsample: index out of range");
    if (i == M / 2)
      throw std::invalid_argument(
          "min_subsample: pattern contains the self-conjugate bin M/2 "
          "(unsupported)");
    if (i < M / 2) largest_first_half = std::max(largest_first_half, i);
  }
  detail::require(largest_first_half >= 0, "min_subsample: no first-half index");
  return 2 * (largest_first_half + 1);
}

FourierSpectrum filter_spectrum(const FourierSpectrum& spec,
                                const SparsityPattern& pattern) {
  FourierSpectrum out;
  out.M = spec.M;
  out.coeffs = VectorXcd::Zero(spec.M);
  for (int i : pattern.indices) {
    detail::require(i >= 0 && i < spec.M, "filter_spectrum: index out of range");
    out.coeffs(i) = spec.coeffs(i);
  }
  return out;
}

bool reflection_closed(const SparsityPattern& pattern, int M) {
  std::set<int> s(pattern.indices.begin(), pattern.indices.end());
  for (int i : s)
    if (!s.count((M - i) % M)) return false;
  return true;
}

bool symmetric(const FourierSpectrum& spec, double rel_tol) {
  const int m = spec.M;
  const double amax = spec.coeffs.cwiseAbs().maxCoeff();
  if (amax == 0.0) return true;
  for (int i = 0; i < m; ++i) {
    const cplx a = spec.coeffs(i);
    const cplx b = spec.coeffs((m - i) % m);
    if (std::abs(a.real() - b.real()) > rel_tol * amax) return false;
    if (std::abs(a.imag() + b.imag()) > rel_tol * amax) return false;
  }
  return true;
}

}  // namespace delay_embed::spectral
