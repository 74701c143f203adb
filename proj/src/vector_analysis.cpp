#include "delay_embed/vector_analysis.hpp"

#include "delay_embed/delay_solver.hpp"

#include <Eigen/SVD>

#include <set>

namespace delay_embed::vector_analysis {

int numeric_rank(const MatrixXcd& m, double rank_tol) {
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  const VectorXd sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rank_tol * sv(0)) ++rank;
  return rank;
}

StackedSpectra make_stacked(std::vector<FourierSpectrum> spectra,
                            double rel_threshold) {
  detail::require(!spectra.empty(), "make_stacked: no spectra");
  const int m = spectra.front().M;
  for (const auto& s : spectra)
    detail::require(s.M == m, "make_stacked: spectra must share M");

  std::set<int> keep;
  for (const auto& s : spectra) {
    const auto pat = spectral::detect_sparsity(s, rel_threshold);
    keep.insert(pat.indices.begin(), pat.indices.end());
  }
  StackedSpectra out;
  out.spectra = std::move(spectra);
  out.union_pattern.indices.assign(keep.begin(), keep.end());
  out.union_pattern.threshold_used = rel_threshold;
  return out;
}

MatrixXcd OCSystem::dense_C() const {
  const int p = static_cast<int>(kept_rows.size());
  MatrixXcd c = MatrixXcd::Zero(p, static_cast<long>(J) * M);
  for (int r = 0; r < p; ++r)
    for (int j = 0; j < J; ++j)
      c(r, static_cast<long>(j) * M + kept_rows[r]) = amplitudes(r, j);
  return c;
}

OCSystem row_eliminate(const StackedSpectra& spectra, double rel_threshold) {
  const int m = spectra.M();
  const int j = spectra.J();
  double global_max = 0.0;
  for (const auto& s : spectra.spectra)
    global_max = std::max(global_max, s.coeffs.cwiseAbs().maxCoeff());

  OCSystem sys;
  sys.M = m;
  sys.J = j;
  for (int i = 0; i < m; ++i) {
    double row_max = 0.0;
    for (const auto& s : spectra.spectra)
      row_max = std::max(row_max, std::abs(s.coeffs(i)));
    if (row_max > rel_threshold * global_max) sys.kept_rows.push_back(i);
  }
  if (sys.kept_rows.empty())
    throw std::invalid_argument("row_eliminate: all rows eliminated");
  sys.amplitudes.resize(sys.kept_rows.size(), j);
  for (size_t r = 0; r < sys.kept_rows.size(); ++r)
    for (int c = 0; c < j; ++c)
      sys.amplitudes(r, c) = spectra.spectra[c].coeffs(sys.kept_rows[r]);
  return sys;
}

namespace {

// [diag(a^(1))A ... diag(a^(J))A | diag(a^(1))b ... diag(a^(J))b] on the
// union-pattern rows; the first J(L+1) columns form the unaugmented system.
MatrixXcd stacked_system(const StackedSpectra& spectra, int L, bool augmented) {
  const int m = spectra.M();
  const int j = spectra.J();
  const auto& idx = spectra.union_pattern.indices;
  const int p = static_cast<int>(idx.size());
  detail::require(p >= 1, "rank_test_vector: empty union pattern");

  auto base = delay_solver::build_spectral_system(spectra.union_pattern, m, L);
  MatrixXcd out(p, j * (L + 1) + (augmented ? j : 0));
  for (int c = 0; c < j; ++c) {
    VectorXcd amp(p);
    for (int r = 0; r < p; ++r) amp(r) = spectra.spectra[c].coeffs(idx[r]);
    out.middleCols(static_cast<long>(c) * (L + 1), L + 1) =
        amp.asDiagonal() * base.matrix;
    if (augmented)
      out.col(static_cast<long>(j) * (L + 1) + c) = amp.asDiagonal() * base.rhs;
  }
  return out;
}

}  // namespace

bool rank_test_vector(const StackedSpectra& spectra, int L, double rank_tol) {
  const MatrixXcd aug = stacked_system(spectra, L, true);
  const int j = spectra.J();
  const MatrixXcd plain = aug.leftCols(aug.cols() - j);
  return numeric_rank(plain, rank_tol) == numeric_rank(aug, rank_tol);
}

int minimal_delay_vector(const StackedSpectra& spectra, double rank_tol) {
  detail::require(!spectra.spectra.empty(), "minimal_delay_vector: no spectra");
  const int p = spectra.P_union();
  for (int l = 0; l + 1 < p; ++l)
    if (rank_test_vector(spectra, l, rank_tol)) return l;
  // guaranteed at L = P_union - 1: the block contains a nonsingular
  // Vandermonde against every nonzero row
  return p - 1;
}

int oc_index(const OCSystem& sys, double rank_tol) {
  const int p = static_cast<int>(sys.kept_rows.size());
  MatrixXcd blocks(p, 0);
  for (int k = 0; k < sys.M; ++k) {
    blocks.conservativeResize(p, static_cast<long>(k + 1) * sys.J);
    for (int j = 0; j < sys.J; ++j)
      for (int r = 0; r < p; ++r)
        blocks(r, static_cast<long>(k) * sys.J + j) =
            sys.amplitudes(r, j) *
            unit_root(sys.M, -static_cast<long long>(k) * sys.kept_rows[r]);
    if (numeric_rank(blocks, rank_tol) == p) return k + 1;
  }
  throw std::runtime_error("oc_index: system is not output controllable");
}

}  // namespace delay_embed::vector_analysis
