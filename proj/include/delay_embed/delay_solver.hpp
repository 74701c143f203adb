#pragma once

#include "delay_embed/spectral.hpp"
#include "delay_embed/types.hpp"

#include <string>
#include <variant>
#include <vector>

namespace delay_embed::delay_solver {

using spectral::SparsityPattern;

// Real delay-transition weights. Column j maps the stacked delay vector to
// the next value of component j; rows are ordered component-major, newest
// sample first within each component block (K_0 multiplies x_k).
struct DelayModel {
  MatrixXd weights;  // J(L+1) x J
  int L = 0;
  int J = 1;
  double imag_residue = 0.0;  // |Im| dropped when a complex solve was realized
  std::string solver;
  double svd_cutoff = 0.0;

  VectorXd scalar_weights() const;  // J == 1 convenience view
};

// Stacked regression in the time domain: regressor rows are delay vectors
// Y_k, target rows the next states x_{k+1}.
struct HankelSystem {
  MatrixXd regressor;  // Q x J(L+1)
  MatrixXd target;     // Q x J
  std::vector<int> row_indices;
  int L = 0;
  int J = 1;
};

// P x (L+1) spectral system A_{I,L} K = b with rows of powers of the nodes
// w^{-i_p}; every entry is constructed from an exact unit root, not
// accumulated.
struct SpectralSystem {
  MatrixXcd matrix;
  VectorXcd rhs;
  VectorXcd nodes;
  int M = 0;
  int L = 0;
  SparsityPattern pattern;
};

// Row selection for build_hankel. AllPeriodic and Explicit wrap indices
// modulo the declared period; Contiguous reads a raw window (partial-period
// training) and requires start >= L and start + count <= N - 1.
struct RowSelection {
  struct AllPeriodic {};
  struct Contiguous {
    int start = 0;
    int count = 0;
  };
  using Explicit = std::vector<int>;
  std::variant<AllPeriodic, Contiguous, Explicit> choice;

  static RowSelection all_periodic() { return {AllPeriodic{}}; }
  static RowSelection contiguous(int start, int count) {
    return {Contiguous{start, count}};
  }
  static RowSelection explicit_rows(std::vector<int> rows) {
    return {Explicit(std::move(rows))};
  }
};

HankelSystem build_hankel(const TimeSeries& ts, int L, const RowSelection& rows);

// Minimum-Frobenius-norm least-squares solution via SVD with relative cutoff;
// unique least-squares solution when the system is overdetermined and full
// rank, minimum-norm interpolant when underdetermined.
DelayModel solve_time_domain(const HankelSystem& sys, double svd_rel_cutoff = 1e-15);

SpectralSystem build_spectral_system(const SparsityPattern& pattern, int M, int L);

enum class SpectralMethod { bp, svd };

// Solves A_{I,L} K = b and realizes the complex solution to a real vector by
// averaging with its conjugate; the discarded imaginary magnitude is reported
// in the model. bp requires the square case L = P-1.
DelayModel solve_spectral(const SpectralSystem& sys,
                          SpectralMethod method = SpectralMethod::svd,
                          double svd_rel_cutoff = 1e-15);

// Closed-form K at L = P-1 from the explicit Vandermonde inverse: elementary
// symmetric sums over node subsets divided by pairwise node differences.
// Enumerates all subsets, so P is capped at 16.
DelayModel exact_K(const SparsityPattern& pattern, int M);

// Theorem: P-1 delays are necessary and sufficient for a scalar signal whose
// spectrum has P nonzero bins.
int minimal_delay_scalar(const SparsityPattern& pattern);

// Autoregressive rollout. seed_window holds the L+1 most recent true states,
// newest in the last column; predictions are fed back in.
TimeSeries predict_rollout(const DelayModel& model, const MatrixXd& seed_window,
                           int n_steps, double dt = 1.0);

// Mean over components of MSE divided by the variance of the true component.
// Any non-finite prediction yields +infinity (diverged rollout).
double nmse(const TimeSeries& pred, const TimeSeries& truth);

// Bjorck-Pereyra primal solve of V(alpha) x = f for the Vandermonde matrix
// with rows (1, alpha_p, alpha_p^2, ...): Newton divided differences followed
// by expansion to the monomial basis. O(n^2) time, O(1) extra storage.
VectorXcd bjorck_pereyra(const VectorXcd& alpha, const VectorXcd& f);

// Minimum-norm least squares via SVD with a relative singular value cutoff.
MatrixXd svd_solve(const MatrixXd& A, const MatrixXd& B, double rel_cutoff);
MatrixXcd svd_solve(const MatrixXcd& A, const MatrixXcd& B, double rel_cutoff);

}  // namespace delay_embed::delay_solver
