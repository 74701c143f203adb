#include "delay_embed/delay_solver.hpp"

#include <Eigen/SVD>

#include <bit>
#include <cmath>
#include <limits>

namespace delay_embed::delay_solver {

VectorXd DelayModel::scalar_weights() const {
  detail::require(J == 1, "scalar_weights: model is not scalar");
  return weights.col(0);
}

namespace {

template <typename Mat>
Mat svd_solve_impl(const Mat& A, const Mat& B, double rel_cutoff) {
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0)
    throw std::invalid_argument("svd_solve: zero matrix");
  const double cut = rel_cutoff * sv(0);
  VectorXd inv = VectorXd::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * (inv.asDiagonal() * (svd.matrixU().adjoint() * B));
}

int wrap_index(int k, int m) {
  int r = k % m;
  return r < 0 ? r + m : r;
}

}  // namespace

MatrixXd svd_solve(const MatrixXd& A, const MatrixXd& B, double rel_cutoff) {
  return svd_solve_impl(A, B, rel_cutoff);
}
MatrixXcd svd_solve(const MatrixXcd& A, const MatrixXcd& B, double rel_cutoff) {
  return svd_solve_impl(A, B, rel_cutoff);
}

HankelSystem build_hankel(const TimeSeries& ts, int L, const RowSelection& rows) {
  validate(ts);
  detail::require(L >= 0, "build_hankel: L must be nonnegative");
  const int j = ts.components();
  const int n = ts.samples();

  std::vector<int> ks;
  bool wrap = false;
  if (std::holds_alternative<RowSelection::AllPeriodic>(rows.choice)) {
    detail::require(ts.period_samples.has_value(),
                    "build_hankel: all-periodic rows need period_samples");
    ks.resize(*ts.period_samples);
    for (int k = 0; k < *ts.period_samples; ++k) ks[k] = k;
    wrap = true;
  } else if (auto* c = std::get_if<RowSelection::Contiguous>(&rows.choice)) {
    detail::require(c->count >= 1, "build_hankel: contiguous row count must be positive");
    detail::require(c->start >= L, "build_hankel: contiguous start must be >= L");
    detail::require(c->start + c->count <= n - 1,
                    "build_hankel: contiguous window overruns the series");
    ks.resize(c->count);
    for (int q = 0; q < c->count; ++q) ks[q] = c->start + q;
  } else {
    ks = std::get<RowSelection::Explicit>(rows.choice);
    detail::require(!ks.empty(), "build_hankel: empty row list");
    detail::require(ts.period_samples.has_value(),
                    "build_hankel: explicit rows wrap and need period_samples");
    for (int k : ks)
      detail::require(k >= 0 && k < *ts.period_samples,
                      "build_hankel: row index outside the period");
    wrap = true;
  }

  const int m = wrap ? *ts.period_samples : 0;
  HankelSystem sys;
  sys.L = L;
  sys.J = j;
  sys.row_indices = ks;
  const int q = static_cast<int>(ks.size());
  sys.regressor.resize(q, j * (L + 1));
  sys.target.resize(q, j);
  for (int r = 0; r < q; ++r) {
    const int k = ks[r];
    for (int comp = 0; comp < j; ++comp) {
      for (int lag = 0; lag <= L; ++lag) {
        const int idx = wrap ? wrap_index(k - lag, m) : k - lag;
        sys.regressor(r, comp * (L + 1) + lag) = ts.data(comp, idx);
      }
      const int tidx = wrap ? wrap_index(k + 1, m) : k + 1;
      sys.target(r, comp) = ts.data(comp, tidx);
    }
  }
  return sys;
}

DelayModel solve_time_domain(const HankelSystem& sys, double svd_rel_cutoff) {
  detail::require(svd_rel_cutoff >= 0.0 && svd_rel_cutoff < 1.0,
                  "solve_time_domain: cutoff must lie in [0, 1)");
  if (sys.regressor.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("solve_time_domain: all-zero regressor");
  DelayModel model;
  model.weights = svd_solve(sys.regressor, sys.target, svd_rel_cutoff);
  model.L = sys.L;
  model.J = sys.J;
  model.solver = "time-svd";
  model.svd_cutoff = svd_rel_cutoff;
  return model;
}

SpectralSystem build_spectral_system(const SparsityPattern& pattern, int M, int L) {
  detail::require(!pattern.indices.empty(), "build_spectral_system: empty pattern");
  detail::require(L >= 0, "build_spectral_system: L must be nonnegative");
  const int p = pattern.P();
  SpectralSystem sys;
  sys.M = M;
  sys.L = L;
  sys.pattern = pattern;
  sys.matrix.resize(p, L + 1);
  sys.rhs.resize(p);
  sys.nodes.resize(p);
  for (int r = 0; r < p; ++r) {
    const int ip = pattern.indices[r];
    detail::require(ip >= 0 && ip < M, "build_spectral_system: index out of range");
    sys.nodes(r) = unit_root(M, -ip);
    for (int c = 0; c <= L; ++c)
      sys.matrix(r, c) = unit_root(M, -static_cast<long long>(ip) * c);
    sys.rhs(r) = unit_root(M, ip);
  }
  return sys;
}

VectorXcd bjorck_pereyra(const VectorXcd& alpha, const VectorXcd& f) {
  const int n = static_cast<int>(alpha.size());
  detail::require(f.size() == n, "bjorck_pereyra: size mismatch");
  VectorXcd c = f;
  for (int k = 0; k < n - 1; ++k)
    for (int j = n - 1; j > k; --j) {
      const cplx denom = alpha(j) - alpha(j - k - 1);
      if (denom == cplx(0.0, 0.0))
        throw std::invalid_argument("bjorck_pereyra: repeated nodes");
      c(j) = (c(j) - c(j - 1)) / denom;
    }
  for (int k = n - 2; k >= 0; --k)
    for (int j = k; j < n - 1; ++j) c(j) -= alpha(k) * c(j + 1);
  return c;
}

namespace {

DelayModel realize(VectorXcd k_complex, const char* solver, double cutoff) {
  DelayModel model;
  model.imag_residue = k_complex.imag().cwiseAbs().maxCoeff();
  model.weights = k_complex.real();
  model.L = static_cast<int>(k_complex.size()) - 1;
  model.J = 1;
  model.solver = solver;
  model.svd_cutoff = cutoff;
  return model;
}

}  // namespace

DelayModel solve_spectral(const SpectralSystem& sys, SpectralMethod method,
                          double svd_rel_cutoff) {
  const int p = static_cast<int>(sys.nodes.size());
  if (method == SpectralMethod::bp) {
    detail::require(sys.L + 1 == p, "solve_spectral: bp needs a square system (L = P-1)");
    return realize(bjorck_pereyra(sys.nodes, sys.rhs), "spectral-bp", 0.0);
  }
  const MatrixXcd rhs = sys.rhs;
  return realize(VectorXcd(svd_solve(sys.matrix, rhs, svd_rel_cutoff)),
                 "spectral-svd", svd_rel_cutoff);
}

DelayModel exact_K(const SparsityPattern& pattern, int M) {
  const int p = pattern.P();
  detail::require(p >= 1, "exact_K: empty pattern");
  if (p > 16)
    throw std::invalid_argument(
        "exact_K: P > 16 rejected; the closed form enumerates node subsets and "
        "its cost grows as binom(P, P/2)");
  SpectralSystem sys = build_spectral_system(pattern, M, p - 1);

  // K_q = sum_p b_p * coeff_q(l_p), where l_p is the Lagrange basis polynomial
  // of node p: coeff_q = (-1)^{P-1-q} e_{P-1-q}(other nodes) / prod(alpha_p -
  // alpha_l). The elementary symmetric sums e_k are accumulated over all
  // 2^(P-1) subsets of the remaining nodes.
  VectorXcd k = VectorXcd::Zero(p);
  std::vector<cplx> others(p - 1);
  std::vector<cplx> prod(static_cast<size_t>(1) << (p - 1));
  for (int n = 0; n < p; ++n) {
    int w = 0;
    for (int l = 0; l < p; ++l)
      if (l != n) others[w++] = sys.nodes(l);

    VectorXcd esym = VectorXcd::Zero(p);
    prod[0] = cplx(1.0, 0.0);
    esym(0) += prod[0];
    for (size_t mask = 1; mask < prod.size(); ++mask) {
      const int low = std::countr_zero(mask);
      prod[mask] = prod[mask & (mask - 1)] * others[low];
      esym(std::popcount(mask)) += prod[mask];
    }

    cplx denom(1.0, 0.0);
    for (int l = 0; l < p; ++l)
      if (l != n) denom *= sys.nodes(n) - sys.nodes(l);

    for (int q = 0; q < p; ++q) {
      const double sign = ((p - 1 - q) % 2 == 0) ? 1.0 : -1.0;
      k(q) += sys.rhs(n) * sign * esym(p - 1 - q) / denom;
    }
  }
  DelayModel model = realize(k, "spectral-exact", 0.0);
  if (model.imag_residue > 1e-8)
    throw std::runtime_error("exact_K: imaginary residue above 1e-8");
  return model;
}

int minimal_delay_scalar(const SparsityPattern& pattern) {
  detail::require(!pattern.indices.empty(), "minimal_delay_scalar: empty pattern");
  return pattern.P() - 1;
}

TimeSeries predict_rollout(const DelayModel& model, const MatrixXd& seed_window,
                           int n_steps, double dt) {
  const int j = model.J;
  const int l = model.L;
  detail::require(seed_window.rows() == j && seed_window.cols() == l + 1,
                  "predict_rollout: seed window must be J x (L+1)");
  detail::require(n_steps >= 1, "predict_rollout: n_steps must be positive");

  MatrixXd window = seed_window;  // newest state in the last column
  TimeSeries out;
  out.data.resize(j, n_steps);
  out.dt = dt;
  VectorXd stacked(j * (l + 1));
  for (int step = 0; step < n_steps; ++step) {
    for (int comp = 0; comp < j; ++comp)
      for (int lag = 0; lag <= l; ++lag)
        stacked(comp * (l + 1) + lag) = window(comp, l - lag);
    const VectorXd next = model.weights.transpose() * stacked;
    out.data.col(step) = next;
    if (l > 0) window.leftCols(l) = window.rightCols(l).eval();
    window.col(l) = next;
  }
  return out;
}

double nmse(const TimeSeries& pred, const TimeSeries& truth) {
  detail::require(pred.data.rows() == truth.data.rows() &&
                      pred.data.cols() == truth.data.cols(),
                  "nmse: shape mismatch");
  if (!pred.data.allFinite()) return std::numeric_limits<double>::infinity();
  const int j = truth.components();
  const int n = truth.samples();
  double acc = 0.0;
  for (int comp = 0; comp < j; ++comp) {
    const double mean = truth.data.row(comp).mean();
    const double var = (truth.data.row(comp).array() - mean).square().sum() / n;
    if (var == 0.0)
      throw std::invalid_argument("nmse: zero-variance truth component");
    const double mse = (pred.data.row(comp) - truth.data.row(comp)).squaredNorm() / n;
    acc += mse / var;
  }
  return acc / j;
}

}  // namespace delay_embed::delay_solver
