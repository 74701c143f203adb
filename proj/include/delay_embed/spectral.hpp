#pragma once

#include "delay_embed/types.hpp"

#include <vector>

namespace delay_embed::spectral {

// Length-M complex coefficient vector a of one period of data, with the
// convention a_i = (1/M) * sum_k x_k e^{+2*pi*i*k*j/M}. Spectra of real
// signals satisfy Re(a_i) = Re(a_{M-i}) and Im(a_i) = -Im(a_{M-i}).
struct FourierSpectrum {
  VectorXcd coeffs;
  int M = 0;
};

// Ascending index set of the retained bins; reflection-closed by construction.
struct SparsityPattern {
  std::vector<int> indices;
  double threshold_used = 0.0;

  int P() const { return static_cast<int>(indices.size()); }
};

// DFT of the first period_samples entries of one component.
FourierSpectrum dft(const TimeSeries& ts, int component = 0);

// Evaluates S_M at the fractional period position t/T. Checks that the
// imaginary residue is below 1e-10 relative to the coefficient mass and
// discards it.
double reconstruct(const FourierSpectrum& spec, double t_over_T);

// Samples the spectrum's trigonometric interpolant at k/M for k = 0..n-1;
// the result is an exactly periodic series with period_samples = M.
TimeSeries synthesize(const FourierSpectrum& spec, int n_samples, double dt = 1.0);

// Bins with |a_i| > rel_threshold * max|a|, symmetrized so that conjugate
// pairs are kept or dropped together. An all-zero spectrum yields an empty
// pattern.
SparsityPattern detect_sparsity(const FourierSpectrum& spec, double rel_threshold);

// Smallest even samples-per-period that preserves the pattern's harmonics:
// 2 * (largest first-half index + 1). Requires even M and a pattern that
// avoids the self-conjugate bin M/2.
int min_subsample(const SparsityPattern& pattern, int M);

// Zeroes every coefficient outside the pattern.
FourierSpectrum filter_spectrum(const FourierSpectrum& spec,
                                const SparsityPattern& pattern);

// True when i is in the pattern iff (M - i) mod M is.
bool reflection_closed(const SparsityPattern& pattern, int M);

// Checks the real-signal conjugate symmetry within rel_tol (relative to the
// largest coefficient magnitude).
bool symmetric(const FourierSpectrum& spec, double rel_tol = 1e-12);

}  // namespace delay_embed::spectral
