#include "delay_embed/types.hpp"

#include <cmath>
#include <numbers>

namespace delay_embed {

void validate(const TimeSeries& ts) {
  detail::require(ts.data.rows() >= 1, "TimeSeries: needs at least one component");
  detail::require(ts.data.cols() >= 1, "TimeSeries: needs at least one sample");
  detail::require(ts.dt > 0.0, "TimeSeries: dt must be positive");
  if (ts.period_samples) {
    detail::require(*ts.period_samples >= 1, "TimeSeries: period_samples must be positive");
    detail::require(*ts.period_samples <= ts.samples(),
                    "TimeSeries: period_samples exceeds sample count");
  }
  if (!ts.data.allFinite())
    throw std::invalid_argument("TimeSeries: non-finite entries");
}

cplx unit_root(int m, long long k) {
  long long r = k % m;
  if (r < 0) r += m;
  return std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(r) /
                             static_cast<double>(m));
}

}  // namespace delay_embed
