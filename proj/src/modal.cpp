#include "delay_embed/modal.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace delay_embed::modal {

CompanionMatrix companion(const DelayModel& model) {
  CompanionMatrix cm;
  cm.L = model.L;
  cm.J = model.J;
  const int l = model.L;
  if (model.J == 1) {
    cm.matrix = MatrixXd::Zero(l + 1, l + 1);
    cm.matrix.col(0) = model.weights.col(0);
    for (int i = 0; i + 1 <= l; ++i) cm.matrix(i, i + 1) = 1.0;
  } else {
    const int j = model.J;
    const int n = j * (l + 1);
    cm.matrix = MatrixXd::Zero(n, n);
    for (int b = 0; b + 1 <= l; ++b)
      cm.matrix.block(b * j, (b + 1) * j, j, j) = MatrixXd::Identity(j, j);
    // last block row W_L .. W_0; weights are stored component-major with the
    // newest sample first, so W_d sits at rows (comp, lag d).
    for (int d = 0; d <= l; ++d) {
      MatrixXd wd(j, j);
      for (int out = 0; out < j; ++out)
        for (int in = 0; in < j; ++in)
          wd(out, in) = model.weights(in * (l + 1) + d, out);
      cm.matrix.block(l * j, (l - d) * j, j, j) = wd;
    }
  }
  return cm;
}

MatrixXd companion_step(const CompanionMatrix& cm, const MatrixXd& window) {
  const int j = cm.J;
  const int l = cm.L;
  detail::require(window.rows() == j && window.cols() == l + 1,
                  "companion_step: window must be J x (L+1)");
  if (cm.scalar_form()) {
    // Y_{k+1}^T = Y_k^T K_comp with Y_k newest-first
    Eigen::RowVectorXd y(l + 1);
    for (int lag = 0; lag <= l; ++lag) y(lag) = window(0, l - lag);
    Eigen::RowVectorXd yn = y * cm.matrix;
    MatrixXd out(1, l + 1);
    for (int lag = 0; lag <= l; ++lag) out(0, l - lag) = yn(lag);
    return out;
  }
  // h_{k+1} = A_L h_k with h_k oldest-first
  VectorXd h(j * (l + 1));
  for (int b = 0; b <= l; ++b) h.segment(b * j, j) = window.col(b);
  VectorXd hn = cm.matrix * h;
  MatrixXd out(j, l + 1);
  for (int b = 0; b <= l; ++b) out.col(b) = hn.segment(b * j, j);
  return out;
}

namespace {

std::vector<int> modal_order(const VectorXcd& ev) {
  std::vector<int> order(ev.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(ev(a)), mb = std::abs(ev(b));
    if (ma != mb) return ma > mb;
    return std::arg(ev(a)) < std::arg(ev(b));
  });
  return order;
}

// Parlett-Reinsch balancing: a diagonal similarity with power-of-two entries
// that equalizes row/column norms. Companion matrices with large weights are
// badly scaled, and the plain QR iteration loses digits without this.
MatrixXd balance(MatrixXd a, VectorXd& scale) {
  const int n = static_cast<int>(a.rows());
  scale = VectorXd::Ones(n);
  bool converged = false;
  while (!converged) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      double c = a.col(i).cwiseAbs().sum() - std::abs(a(i, i));
      double r = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c > r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s && f != 1.0) {
        converged = false;
        scale(i) *= f;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
  return a;
}

}  // namespace

ModalDecomposition eigendecompose(const CompanionMatrix& cm) {
  VectorXd scale;
  const MatrixXd balanced = balance(cm.matrix, scale);
  Eigen::EigenSolver<MatrixXd> es(balanced);
  detail::require(es.info() == Eigen::Success, "eigendecompose: solver failed");
  const auto order = modal_order(es.eigenvalues());

  ModalDecomposition dec;
  const int n = cm.dim();
  dec.eigenvalues.resize(n);
  dec.spatial_modes.resize(cm.J, n);
  for (int i = 0; i < n; ++i) {
    dec.eigenvalues(i) = es.eigenvalues()(order[i]);
    // undo the balancing similarity on the eigenvectors
    VectorXcd v = es.eigenvectors().col(order[i]);
    for (int r = 0; r < n; ++r) v(r) *= scale(r);
    dec.spatial_modes.col(i) = v.tail(cm.J) / v.norm();
  }
  dec.r_prime = n;

  if (cm.scalar_form()) {
    // Left eigenvector for lambda is (lambda^L, ..., lambda, 1) whenever the
    // companion dynamics Y^T K_comp = lambda Y^T hold; measure the worst
    // relative defect over distinct eigenvalues.
    double worst = 0.0;
    bool distinct = true;
    for (int a = 0; a < n && distinct; ++a)
      for (int b = a + 1; b < n; ++b)
        if (std::abs(dec.eigenvalues(a) - dec.eigenvalues(b)) < 1e-10) {
          distinct = false;
          break;
        }
    if (distinct) {
      for (int i = 0; i < n; ++i) {
        const cplx lam = dec.eigenvalues(i);
        VectorXcd v(n);
        cplx pw(1.0, 0.0);
        for (int r = n - 1; r >= 0; --r) {
          v(r) = pw;
          pw *= lam;
        }
        const VectorXcd defect =
            cm.matrix.transpose().cast<cplx>() * v - lam * v;
        worst = std::max(worst, defect.norm() / std::max(v.norm(), 1e-300));
      }
      dec.structure_deviation = worst;
      dec.vandermonde_structure_ok = worst < 1e-8;
    } else {
      dec.structure_deviation = std::numeric_limits<double>::quiet_NaN();
      dec.vandermonde_structure_ok = false;  // repeated eigenvalues, reported not fatal
    }
  }
  return dec;
}

HodmdResult hodmd(const TimeSeries& data, int r, int L, double r_prime_cutoff,
                  int train_count) {
  validate(data);
  const int j = data.components();
  const int m_all = data.samples();
  const int m = train_count > 0 ? train_count : m_all;
  detail::require(m <= m_all, "hodmd: train_count exceeds series length");
  if (r > std::min(j, m))
    throw std::invalid_argument("hodmd: r exceeds min(J, M), the spatial rank cap");
  if (L > m - 2)
    throw std::invalid_argument("hodmd: L exceeds M-2, the delay-window cap");
  detail::require(r >= 1 && L >= 0, "hodmd: bad r or L");

  const MatrixXd window = data.data.leftCols(m);
  Eigen::BDCSVD<MatrixXd> spatial(window, Eigen::ComputeThinU);
  const MatrixXd u_r = spatial.matrixU().leftCols(r);
  const MatrixXd reduced = u_r.transpose() * window;  // r x m

  const int cols = m - 1 - L;  // delay-vector pairs
  MatrixXd g0(r * (L + 1), cols), g1(r * (L + 1), cols);
  for (int c = 0; c < cols; ++c) {
    for (int b = 0; b <= L; ++b) {  // oldest first
      g0.col(c).segment(b * r, r) = reduced.col(c + b);
      g1.col(c).segment(b * r, r) = reduced.col(c + b + 1);
    }
  }

  Eigen::BDCSVD<MatrixXd> svd(g0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd sv = svd.singularValues();
  int rp = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > r_prime_cutoff * sv(0)) ++rp;
  rp = std::min({rp, r * (L + 1), m - 1 - L});
  detail::require(rp >= 1, "hodmd: delay matrix has no retained singular values");

  const MatrixXd q = svd.matrixU().leftCols(rp);
  const MatrixXd z = svd.matrixV().leftCols(rp);
  const VectorXd s = sv.head(rp);
  const MatrixXd a_hat =
      q.transpose() * g1 * z * s.cwiseInverse().asDiagonal();

  Eigen::EigenSolver<MatrixXd> es(a_hat);
  detail::require(es.info() == Eigen::Success, "hodmd: eigensolver failed");
  const auto order = modal_order(es.eigenvalues());

  HodmdResult fit;
  fit.r = r;
  fit.L = L;
  fit.n_snapshots = m;
  fit.u_r = u_r;
  fit.decomposition.r_prime = rp;
  fit.decomposition.eigenvalues.resize(rp);
  MatrixXcd p_sorted(rp, rp);
  for (int i = 0; i < rp; ++i) {
    fit.decomposition.eigenvalues(i) = es.eigenvalues()(order[i]);
    p_sorted.col(i) = es.eigenvectors().col(order[i]);
  }
  fit.delay_modes = q.cast<cplx>() * p_sorted;  // r(L+1) x r'

  // spatial modes U_r q_i from the newest block of each lifted eigenvector
  fit.decomposition.spatial_modes =
      u_r.cast<cplx>() * fit.delay_modes.bottomRows(r);

  // temporal amplitudes p_i^T h_L from the first training delay vector
  VectorXd h_l(r * (L + 1));
  for (int b = 0; b <= L; ++b) h_l.segment(b * r, r) = reduced.col(b);
  fit.decomposition.temporal_amplitudes =
      p_sorted.colPivHouseholderQr().solve(q.transpose().cast<cplx>() *
                                           h_l.cast<cplx>());
  return fit;
}

TimeSeries modal_rollout(const HodmdResult& fit, const TimeSeries& data,
                         int horizon) {
  detail::require(horizon >= fit.L + 2, "modal_rollout: horizon too short");
  const int rp = fit.decomposition.r_prime;
  const int l = fit.L;
  TimeSeries out;
  out.data.resize(data.components(), horizon - (l + 1));
  out.dt = data.dt;
  VectorXcd powered = fit.decomposition.temporal_amplitudes;
  const VectorXcd& ev = fit.decomposition.eigenvalues;
  for (int k = l; k < horizon - 1; ++k) {
    // x_{k+1} = sum_i lambda_i^{k+1-L} (U_r q_i) b_i, accumulated recursively
    VectorXcd updated(rp);
    for (int i = 0; i < rp; ++i) updated(i) = powered(i) * ev(i);
    powered = updated;
    out.data.col(k - l) =
        (fit.decomposition.spatial_modes * powered).real();
  }
  return out;
}

OptimalDelay optimal_delay(int M, int r) {
  detail::require(M >= 2 && r >= 1, "optimal_delay: need M >= 2, r >= 1");
  OptimalDelay od;
  od.L_opt = static_cast<int>(std::ceil(static_cast<double>(M) / (r + 1)));
  od.L_star = static_cast<double>(M) / (r + 1) - 1.0;
  od.r_prime_star = static_cast<double>(r) * M / (r + 1);
  return od;
}

double sigma_min_at(const CompanionMatrix& cm, cplx z) {
  const int n = cm.dim();
  MatrixXcd shifted = -cm.matrix.cast<cplx>();
  shifted.diagonal().array() += z;
  Eigen::JacobiSVD<MatrixXcd> svd(shifted);
  return svd.singularValues()(n - 1);
}

PseudospectrumGrid pseudospectrum(const CompanionMatrix& cm, const GridSpec& grid,
                                  int n_threads) {
  detail::require(grid.nx >= 2 && grid.ny >= 2,
                  "pseudospectrum: grid resolution must be >= 2 per axis");
  PseudospectrumGrid out;
  out.re = VectorXd::LinSpaced(grid.nx, grid.re_min, grid.re_max);
  out.im = VectorXd::LinSpaced(grid.ny, grid.im_min, grid.im_max);
  out.sigma_min.resize(grid.ny, grid.nx);

  const int workers = n_threads > 0
                          ? n_threads
                          : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  std::atomic<int> next_row{0};
  auto run = [&]() {
    for (;;) {
      const int row = next_row.fetch_add(1);
      if (row >= grid.ny) return;
      for (int col = 0; col < grid.nx; ++col)
        out.sigma_min(row, col) = sigma_min_at(cm, {out.re(col), out.im(row)});
    }
  };
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace delay_embed::modal
