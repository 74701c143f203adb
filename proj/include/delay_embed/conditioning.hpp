#pragma once

#include "delay_embed/delay_solver.hpp"

#include <optional>

namespace delay_embed::conditioning {

using spectral::SparsityPattern;

// Everything the sweep CSV reports for one (pattern, M, L) point. Inapplicable
// bounds are empty optionals, never errors.
struct ConditionReport {
  double kappa2 = 0.0;
  double kappaF = 0.0;
  double kappa_eff = 0.0;
  double delta = 0.0;  // minimal pairwise node distance
  double minnorm_upper = 0.0;
  double prop3_upper = 0.0;
  std::optional<double> bazan_upper;
  std::optional<double> kunis_lower;
  bool qualitative = false;  // kappa2 at or beyond ~1e16 is noise-floor limited
};

// sigma_max / sigma_min over the positive singular values of the full matrix.
double cond2(const MatrixXd& m);
double cond2(const MatrixXcd& m);

// Frobenius condition number ||A||_F * ||A^+||_F.
double condF(const MatrixXcd& m);

// sigma_max / sigma_min over singular values above rel_cutoff * sigma_max.
double cond_effective(const MatrixXd& m, double rel_cutoff);
double cond_effective(const MatrixXcd& m, double rel_cutoff);

// Tight upper bound on ||K_L||_2^2 for the minimum-norm solution:
// ||K_{P-1}||^2 / (1 + floor((L-P+1)/M)). Requires L >= P-1.
double min_norm_bound(const SparsityPattern& pattern, int M, int L);

// Upper bound on kappa2(A_{I,L}) via the Frobenius-norm route:
// 1 + d/2 * (1 + sqrt(1 + 4/d)), d built from the min-norm bound and the
// minimal node separation. d = 0 collapses to exactly 1.
double prop3_upper(const SparsityPattern& pattern, int M, int L);

// Well-separated-nodes bound sqrt(1 + 2/(delta(L+1)/(2P-2) - 1)); only
// applicable when delta*(L+1) > 2(P-1).
std::optional<double> bazan_upper(const SparsityPattern& pattern, int M, int L);

// Nearly-colliding-nodes lower bound sqrt(6)/(pi*tau) with
// tau = (L+1) * min wrapped node spacing (fractions of the circle); only
// applicable when tau <= 1.
std::optional<double> kunis_lower(const SparsityPattern& pattern, int M, int L);

double min_node_distance(const SparsityPattern& pattern, int M);

ConditionReport analyze_spectral_system(const SparsityPattern& pattern, int M,
                                        int L, double eff_cutoff = 1e-15);

}  // namespace delay_embed::conditioning
