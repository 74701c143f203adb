#include <doctest.h>

#include "delay_embed/signals.hpp"
#include "delay_embed/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace delay_embed;
using namespace delay_embed::spectral;

namespace {

// Deterministic reflection-symmetric spectrum with every bin nonzero.
FourierSpectrum dense_symmetric_spectrum(int m, std::uint64_t seed) {
  signals::GaussianStream g(seed);
  FourierSpectrum spec;
  spec.M = m;
  spec.coeffs = VectorXcd::Zero(m);
  spec.coeffs(0) = cplx(g.next(), 0.0);
  for (int i = 1; i < m - i; ++i) {
    const cplx a(g.next(), g.next());
    spec.coeffs(i) = a;
    spec.coeffs(m - i) = std::conj(a);
  }
  if (m % 2 == 0) spec.coeffs(m / 2) = cplx(g.next(), 0.0);
  for (int i = 0; i < m; ++i)
    if (std::abs(spec.coeffs(i)) < 0.05)
      spec.coeffs(i) += spec.coeffs(i).real() >= 0 ? 0.1 : -0.1;
  return spec;
}

}  // namespace

TEST_CASE("dft of trivial spectra") {
  SUBCASE("zero signal") {
    TimeSeries ts;
    ts.data = MatrixXd::Zero(1, 8);
    ts.dt = 1.0;
    ts.period_samples = 8;
    const auto spec = dft(ts);
    CHECK(spec.coeffs.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("single cosine splits across the conjugate pair") {
    TimeSeries ts;
    ts.data.resize(1, 4);
    for (int k = 0; k < 4; ++k)
      ts.data(0, k) = std::cos(2.0 * std::numbers::pi * k / 4.0);
    ts.dt = 1.0;
    ts.period_samples = 4;
    const auto spec = dft(ts);
    CHECK(std::abs(spec.coeffs(0)) < 1e-15);
    CHECK(std::abs(spec.coeffs(1) - cplx(0.5, 0.0)) < 1e-15);
    CHECK(std::abs(spec.coeffs(2)) < 1e-15);
    CHECK(std::abs(spec.coeffs(3) - cplx(0.5, 0.0)) < 1e-15);
  }

  SUBCASE("missing period_samples is rejected") {
    TimeSeries ts;
    ts.data = MatrixXd::Ones(1, 8);
    ts.dt = 1.0;
    CHECK_THROWS_AS((void)dft(ts), std::invalid_argument);
  }
}

TEST_CASE("five-mode spectrum: bins, mirrors, amplitude") {
  const auto spec = dft(signals::gen_five_mode(100, 1));
  const auto pat = detect_sparsity(spec, 1e-10);
  CHECK(pat.indices == std::vector<int>{1, 2, 4, 8, 12, 88, 92, 96, 98, 99});
  CHECK(std::abs(spec.coeffs(1)) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(symmetric(spec));
  // the declared period is minimal, so the fundamental bin is populated
  CHECK(std::abs(spec.coeffs(1)) > 1e-12);
}

TEST_CASE("reconstruct interpolates the samples and between them") {
  const TimeSeries ts = signals::gen_five_mode(100, 1);
  const auto spec = dft(ts);

  SUBCASE("identity at the sample points") {
    for (int k = 0; k < 100; k += 7)
      CHECK(reconstruct(spec, k / 100.0) ==
            doctest::Approx(ts.data(0, k)).epsilon(1e-10));
  }

  SUBCASE("between samples it matches the closed form") {
    // band-limited sparse signals interpolate exactly; oracle is the formula
    CHECK(reconstruct(spec, 0.005) ==
          doctest::Approx(signals::five_mode_value(0.5)).epsilon(1e-10));
  }

  SUBCASE("all-zero spectrum evaluates to zero") {
    FourierSpectrum zero;
    zero.M = 16;
    zero.coeffs = VectorXcd::Zero(16);
    CHECK(reconstruct(zero, 0.37) == 0.0);
  }

  SUBCASE("asymmetric spectrum is rejected") {
    FourierSpectrum bad;
    bad.M = 4;
    bad.coeffs = VectorXcd::Zero(4);
    bad.coeffs(1) = cplx(0.0, 1.0);  // no conjugate partner
    CHECK_THROWS_AS((void)reconstruct(bad, 0.3), std::runtime_error);
  }
}

TEST_CASE("synthesize round-trips through dft") {
  const auto spec = dense_symmetric_spectrum(12, 5);
  const TimeSeries ts = synthesize(spec, 12);
  const auto back = dft(ts);
  CHECK((back.coeffs - spec.coeffs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("detect_sparsity") {
  SUBCASE("zero spectrum gives an empty pattern") {
    FourierSpectrum zero;
    zero.M = 8;
    zero.coeffs = VectorXcd::Zero(8);
    CHECK(detect_sparsity(zero, 1e-10).P() == 0);
  }

  SUBCASE("pattern is reflection-closed and monotone in the threshold") {
    const auto spec = dft(signals::gen_five_mode(100, 1));
    const auto loose = detect_sparsity(spec, 1e-10);
    CHECK(reflection_closed(loose, 100));
    // 0.15 bin magnitude over 1.2 max: a 0.2 relative cut keeps a subset
    const auto tight = detect_sparsity(spec, 0.2);
    CHECK(reflection_closed(tight, 100));
    for (int i : tight.indices)
      CHECK(std::find(loose.indices.begin(), loose.indices.end(), i) !=
            loose.indices.end());
    CHECK(tight.P() < loose.P());
  }
}

TEST_CASE("min_subsample") {
  SUBCASE("five-mode pattern gives 26") {
    const auto pat = detect_sparsity(dft(signals::gen_five_mode(100, 1)), 1e-10);
    CHECK(min_subsample(pat, 100) == 26);
  }

  SUBCASE("single frequency gives 4") {
    SparsityPattern pat;
    pat.indices = {1, 15};
    CHECK(min_subsample(pat, 16) == 4);
  }

  SUBCASE("largest first-half index drives the result") {
    SparsityPattern x1;  // i_{P/2-1} = 9
    x1.indices = {1, 3, 5, 7, 9, 767, 769, 771, 773, 775};
    CHECK(min_subsample(x1, 776) == 20);
    SparsityPattern x2;  // i_{P/2-1} = 18
    x2.indices = {2, 6, 10, 14, 18, 758, 762, 766, 770, 774};
    CHECK(min_subsample(x2, 776) == 38);
  }

  SUBCASE("errors") {
    SparsityPattern empty;
    CHECK_THROWS_AS((void)min_subsample(empty, 16), std::invalid_argument);
    SparsityPattern mid;
    mid.indices = {8};
    CHECK_THROWS_AS((void)min_subsample(mid, 16), std::invalid_argument);
    SparsityPattern odd;
    odd.indices = {1, 14};
    CHECK_THROWS_AS((void)min_subsample(odd, 15), std::invalid_argument);
  }
}

TEST_CASE("filter_spectrum") {
  const auto spec = dft(signals::gen_five_mode(100, 1));

  SUBCASE("full pattern is the identity") {
    SparsityPattern all;
    for (int i = 0; i < 100; ++i) all.indices.push_back(i);
    const auto out = filter_spectrum(spec, all);
    CHECK((out.coeffs - spec.coeffs).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("empty pattern zeroes everything") {
    const auto out = filter_spectrum(spec, SparsityPattern{});
    CHECK(out.coeffs.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("truncation error equals the discarded coefficient energy") {
    // Parseval oracle: (1/M) sum_k |x_k - xf_k|^2 = sum_{i not kept} |a_i|^2
    const auto pat = detect_sparsity(spec, 0.3);
    const auto filt = filter_spectrum(spec, pat);
    const TimeSeries raw = synthesize(spec, 100);
    const TimeSeries cut = synthesize(filt, 100);
    double discarded = 0.0;
    for (int i = 0; i < 100; ++i)
      if (std::find(pat.indices.begin(), pat.indices.end(), i) ==
          pat.indices.end())
        discarded += std::norm(spec.coeffs(i));
    const double err = (raw.data - cut.data).squaredNorm() / 100.0;
    CHECK(err == doctest::Approx(discarded).epsilon(1e-10));
  }
}

TEST_CASE("subsampling to the advertised minimum keeps the first-half bins") {
  // generate from a sparse symmetric spectrum, subsample to M*, re-transform
  FourierSpectrum spec;
  spec.M = 96;
  spec.coeffs = VectorXcd::Zero(96);
  for (int i : {2, 3, 8}) {
    const cplx a(0.4 + 0.1 * i, 0.2 - 0.05 * i);
    spec.coeffs(i) = a;
    spec.coeffs(96 - i) = std::conj(a);
  }
  const auto pat = detect_sparsity(spec, 1e-10);
  const int mstar = min_subsample(pat, 96);
  CHECK(mstar == 18);
  // resample the interpolant on a 90-per-period grid (divisible by M* = 18)
  TimeSeries fine90;
  fine90.data.resize(1, 180);
  for (int k = 0; k < 180; ++k) fine90.data(0, k) = reconstruct(spec, k / 90.0);
  fine90.dt = 1.0;
  fine90.period_samples = 90;
  const TimeSeries coarse = signals::subsample(fine90, 5);
  const auto pat_coarse = detect_sparsity(dft(coarse), 1e-10);
  std::vector<int> first;
  for (int i : pat_coarse.indices)
    if (i < 9) first.push_back(i);
  CHECK(first == std::vector<int>{2, 3, 8});
}
