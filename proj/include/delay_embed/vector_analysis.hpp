#pragma once

#include "delay_embed/spectral.hpp"
#include "delay_embed/types.hpp"

#include <vector>

namespace delay_embed::vector_analysis {

using spectral::FourierSpectrum;
using spectral::SparsityPattern;

// The J per-component spectra of a vector signal plus the union of their
// sparsity patterns (rows where any component is nonzero).
struct StackedSpectra {
  std::vector<FourierSpectrum> spectra;
  SparsityPattern union_pattern;

  int M() const { return spectra.empty() ? 0 : spectra.front().M; }
  int J() const { return static_cast<int>(spectra.size()); }
  int P_union() const { return union_pattern.P(); }
};

StackedSpectra make_stacked(std::vector<FourierSpectrum> spectra,
                            double rel_threshold);

// The linear system induced by the spectra: A = blockdiag of J copies of
// Lambda^{-1}, B = blockdiag of J all-ones vectors, C the stacked coefficient
// diagonals with zero rows eliminated. Lambda and B are never materialized;
// the C rows are carried as a P x J amplitude table over the kept indices.
struct OCSystem {
  int M = 0;
  int J = 0;
  std::vector<int> kept_rows;  // ascending bin indices with a nonzero entry
  MatrixXcd amplitudes;        // P x J: amplitudes(p, j) = a^{(j)}_{kept_rows[p]}

  // Dense C (P x J*M) for small problems; test and report use only.
  MatrixXcd dense_C() const;
};

// Removes rows whose largest amplitude across components is at or below
// rel_threshold times the global maximum. Throws if nothing survives.
OCSystem row_eliminate(const StackedSpectra& spectra, double rel_threshold);

// Existence test for a real solution of the stacked delay system at L delays:
// the rank of [diag(a^(1))A ... diag(a^(J))A] restricted to union-pattern rows
// must equal the rank of its augmentation with the J vectors diag(a^(j))b.
bool rank_test_vector(const StackedSpectra& spectra, int L, double rank_tol = 1e-10);

// Smallest L in 0..P_union-1 passing the rank test.
int minimal_delay_vector(const StackedSpectra& spectra, double rank_tol = 1e-10);

// Least mu with [CB CAB ... CA^{mu-1}B] full row rank; block columns are
// generated one delay at a time as amplitudes(p, j) * w^{-k * kept_rows[p]}.
int oc_index(const OCSystem& sys, double rank_tol = 1e-10);

// Numeric rank with threshold rank_tol * sigma_max.
int numeric_rank(const MatrixXcd& m, double rank_tol);

}  // namespace delay_embed::vector_analysis
