#pragma once

#include "delay_embed/delay_solver.hpp"
#include "delay_embed/types.hpp"

#include <vector>

namespace delay_embed::modal {

using delay_solver::DelayModel;

// Scalar form (J = 1): first column K_0..K_L, identity superdiagonal.
// Block form: identity super-blocks and the last block row W_L .. W_0.
// Structural zeros and ones are exact.
struct CompanionMatrix {
  MatrixXd matrix;
  int L = 0;
  int J = 1;

  bool scalar_form() const { return J == 1; }
  int dim() const { return static_cast<int>(matrix.rows()); }
};

struct ModalDecomposition {
  VectorXcd eigenvalues;  // descending modulus, then ascending phase
  MatrixXcd spatial_modes;       // J x r' (lifted through U_r for hodmd)
  VectorXcd temporal_amplitudes; // r'
  int r_prime = 0;
  // Scalar-companion diagnostic: left eigenvectors must follow the
  // Vandermonde progression of the eigenvalues when those are distinct.
  bool vandermonde_structure_ok = false;
  double structure_deviation = 0.0;
};

struct PseudospectrumGrid {
  VectorXd re;  // nx grid coordinates
  VectorXd im;  // ny grid coordinates
  MatrixXd sigma_min;  // ny x nx, row i / col j at (re(j), im(i))
};

struct GridSpec {
  double re_min = -1.5, re_max = 1.5;
  double im_min = -1.5, im_max = 1.5;
  int nx = 301, ny = 301;
};

CompanionMatrix companion(const DelayModel& model);

// One application of the companion dynamics to a delay window (newest last).
MatrixXd companion_step(const CompanionMatrix& cm, const MatrixXd& window);

// Eigenvalues (and the structure diagnostic) of a companion matrix. Spatial
// modes are the last J rows of the eigenvectors; amplitudes are left empty
// (they require a data window).
ModalDecomposition eigendecompose(const CompanionMatrix& cm);

// SVD-reduced high-order DMD exactly in pipeline order: spatial SVD to r,
// delay stacking to r(L+1), second SVD truncated at r_prime_cutoff (and the
// rank caps r(L+1) and M-1-L), reduced operator, modes lifted back through
// U_r. train_count limits the fit to a leading window of the series (0 means
// the whole series).
struct HodmdResult {
  ModalDecomposition decomposition;
  MatrixXd u_r;              // J x r spatial basis
  MatrixXcd delay_modes;     // r(L+1) x r' eigenvectors lifted by Q_{r'}
  int r = 0;
  int L = 0;
  int n_snapshots = 0;       // snapshots used for the fit
};
HodmdResult hodmd(const TimeSeries& data, int r, int L,
                  double r_prime_cutoff = 1e-10, int train_count = 0);

// Modal reconstruction/extrapolation from the fitted decomposition: returns
// x_hat_{k+1} for k = L .. horizon-2 in the original J-dimensional space.
TimeSeries modal_rollout(const HodmdResult& fit, const TimeSeries& data,
                         int horizon);

// L_opt = ceil(M/(r+1)) plus the real-valued constraint intersection
// L_* = M/(r+1) - 1, r'_* = r M/(r+1).
struct OptimalDelay {
  int L_opt = 0;
  double L_star = 0.0;
  double r_prime_star = 0.0;
};
OptimalDelay optimal_delay(int M, int r);

// sigma_min(zI - A) over a rectangular grid; rows of the output follow the
// imaginary axis, columns the real axis. Parallel over grid rows.
PseudospectrumGrid pseudospectrum(const CompanionMatrix& cm, const GridSpec& grid,
                                  int n_threads = 0);

double sigma_min_at(const CompanionMatrix& cm, cplx z);

}  // namespace delay_embed::modal
