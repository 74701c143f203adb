#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>

namespace delay_embed {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

// Uniformly sampled real trajectory. Rows are components, columns are samples.
struct TimeSeries {
  MatrixXd data;  // J x N
  double dt = 1.0;
  std::optional<int> period_samples;  // samples per declared period

  int components() const { return static_cast<int>(data.rows()); }
  int samples() const { return static_cast<int>(data.cols()); }
};

struct NoiseSpec {
  double snr_fraction = 0.0;  // noise std as a fraction of per-component signal std
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument if the series violates its invariants:
// N >= 1, J >= 1, dt > 0, finite entries, period_samples <= N when set.
void validate(const TimeSeries& ts);

// Unit root e^{-2*pi*i*k/m} with exact angle reduction; k may be negative.
cplx unit_root(int m, long long k);

namespace detail {
inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace detail

}  // namespace delay_embed
