#include "delay_embed/conditioning.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numbers>

namespace delay_embed::conditioning {

namespace {

template <typename Mat>
VectorXd singular_values(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues();
}

template <typename Mat>
double cond2_impl(const Mat& m) {
  const VectorXd sv = singular_values(m);
  double smin = 0.0;
  for (int i = sv.size() - 1; i >= 0; --i)
    if (sv(i) > 0.0) {
      smin = sv(i);
      break;
    }
  if (smin == 0.0) throw std::invalid_argument("cond2: zero matrix");
  return sv(0) / smin;
}

template <typename Mat>
double cond_eff_impl(const Mat& m, double rel_cutoff) {
  detail::require(rel_cutoff > 0.0 && rel_cutoff < 1.0,
                  "cond_effective: cutoff must lie in (0, 1)");
  const VectorXd sv = singular_values(m);
  if (sv.size() == 0 || sv(0) == 0.0)
    throw std::invalid_argument("cond_effective: zero matrix");
  const double cut = rel_cutoff * sv(0);
  double smin = sv(0);
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) smin = sv(i);
  return sv(0) / smin;
}

}  // namespace

double cond2(const MatrixXd& m) { return cond2_impl(m); }
double cond2(const MatrixXcd& m) { return cond2_impl(m); }
double cond_effective(const MatrixXd& m, double rel_cutoff) {
  return cond_eff_impl(m, rel_cutoff);
}
double cond_effective(const MatrixXcd& m, double rel_cutoff) {
  return cond_eff_impl(m, rel_cutoff);
}

double condF(const MatrixXcd& m) {
  const VectorXd sv = singular_values(m);
  double fwd = 0.0, inv = 0.0;
  for (int i = 0; i < sv.size(); ++i) {
    fwd += sv(i) * sv(i);
    if (sv(i) > 0.0) inv += 1.0 / (sv(i) * sv(i));
  }
  return std::sqrt(fwd) * std::sqrt(inv);
}

double min_node_distance(const SparsityPattern& pattern, int M) {
  const int p = pattern.P();
  detail::require(p >= 2, "min_node_distance: needs at least two nodes");
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b) {
      const double d =
          std::abs(unit_root(M, -pattern.indices[a]) - unit_root(M, -pattern.indices[b]));
      best = std::min(best, d);
    }
  return best;
}

namespace {

// ||K_{P-1}||^2 from the unique square solution, computed with the same
// truncated-SVD route as every other minimum-norm solve so that measured
// norms and bounds share one arithmetic path at L = P-1.
double base_norm_sq(const SparsityPattern& pattern, int M) {
  auto sys = delay_solver::build_spectral_system(pattern, M, pattern.P() - 1);
  const MatrixXcd rhs = sys.rhs;
  return delay_solver::svd_solve(sys.matrix, rhs, 1e-15).squaredNorm();
}

int floor_term(int M, int P, int L) { return 1 + (L - P + 1) / M; }

}  // namespace

double min_norm_bound(const SparsityPattern& pattern, int M, int L) {
  const int p = pattern.P();
  detail::require(p >= 1, "min_norm_bound: empty pattern");
  detail::require(L >= p - 1, "min_norm_bound: requires L >= P-1");
  return base_norm_sq(pattern, M) / floor_term(M, p, L);
}

double prop3_upper(const SparsityPattern& pattern, int M, int L) {
  const int p = pattern.P();
  detail::require(p >= 1, "prop3_upper: empty pattern");
  detail::require(L >= p - 1, "prop3_upper: requires L >= P-1");
  if (p == 1) return 1.0;
  const double delta = min_node_distance(pattern, M);
  const double norm_bound =
      base_norm_sq(pattern, M) / ((p - 1) * floor_term(M, p, L) * delta * delta);
  const double d = p * (std::pow(1.0 + norm_bound, (p - 1) / 2.0) - 1.0);
  if (d == 0.0) return 1.0;
  if (!std::isfinite(d)) return std::numeric_limits<double>::infinity();
  return 1.0 + 0.5 * d * (1.0 + std::sqrt(1.0 + 4.0 / d));
}

std::optional<double> bazan_upper(const SparsityPattern& pattern, int M, int L) {
  const int p = pattern.P();
  if (p < 2) return std::nullopt;
  const double delta = min_node_distance(pattern, M);
  if (delta * (L + 1) <= 2.0 * (p - 1)) return std::nullopt;
  return std::sqrt(1.0 + 2.0 / (delta * (L + 1) / (2.0 * p - 2.0) - 1.0));
}

std::optional<double> kunis_lower(const SparsityPattern& pattern, int M, int L) {
  const int p = pattern.P();
  if (p < 2) return std::nullopt;
  // wrapped spacing of the node parameters t_j = i_j / M on the torus
  double gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b) {
      const int diff = std::abs(pattern.indices[a] - pattern.indices[b]) % M;
      gap = std::min(gap, static_cast<double>(std::min(diff, M - diff)) / M);
    }
  const double tau = (L + 1) * gap;
  if (tau > 1.0) return std::nullopt;
  return std::sqrt(6.0) / (std::numbers::pi * tau);
}

ConditionReport analyze_spectral_system(const SparsityPattern& pattern, int M,
                                        int L, double eff_cutoff) {
  auto sys = delay_solver::build_spectral_system(pattern, M, L);
  ConditionReport rep;
  rep.kappa2 = cond2(sys.matrix);
  rep.kappaF = condF(sys.matrix);
  rep.kappa_eff = cond_effective(sys.matrix, eff_cutoff);
  rep.delta = pattern.P() >= 2 ? min_node_distance(pattern, M) : 0.0;
  const int p = pattern.P();
  if (L >= p - 1) {
    rep.minnorm_upper = min_norm_bound(pattern, M, L);
    rep.prop3_upper = prop3_upper(pattern, M, L);
  }
  rep.bazan_upper = bazan_upper(pattern, M, L);
  rep.kunis_lower = kunis_lower(pattern, M, L);
  rep.qualitative = rep.kappa2 >= 1e16;
  return rep;
}

}  // namespace delay_embed::conditioning
