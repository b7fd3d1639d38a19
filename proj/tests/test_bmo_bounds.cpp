#include "doctest.h"

#include "weylab/bmo_bounds.hpp"
#include "weylab/rng.hpp"

#include <cmath>
#include <numbers>

using namespace weylab;

TEST_CASE("S and T for squares with 1/n") {
  const SeriesSpec spec = SeriesSpec::power_law(2, 1.0);
  const BoundReport st = s_t_sequences(spec, 1000);
  CHECK(st.S[0] == doctest::Approx(1.0));
  CHECK(st.S[1] == doctest::Approx(3.0));
  CHECK(st.S[99] == doctest::Approx(100.0 * 101.0 / 2.0));
  CHECK(neighbour_gap(spec, 5) == doctest::Approx(9.0));
  // T_1 = a_2^2 / (nu_3 - nu_2) + sum_{n>=3} 1 / (n^2 (2n - 1))
  long double t = 1.0L / (4.0L * 5.0L);
  for (long n = 3; n <= 2'000'000; ++n) t += 1.0L / (static_cast<long double>(n) * n * (2.0L * n - 1.0L));
  t += 1.0L / (4.0L * 2e6L * 2e6L);
  CHECK(st.T[0] == doctest::Approx(static_cast<double>(t)).epsilon(1e-9));
  for (std::size_t i = 1; i < st.S.size(); ++i) {
    CHECK(st.S[i] >= st.S[i - 1]);
    CHECK(st.tail_sq[i] <= st.tail_sq[i - 1]);
  }
  CHECK(st.tail_sq[0] == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0 - 1.0).epsilon(1e-9));
}

TEST_CASE("finite lists use single neighbour gaps at the ends") {
  const SeriesSpec spec = SeriesSpec::from_lists({1, 10, 100}, {1, 1, 1});
  const BoundReport st = s_t_sequences(spec, 3);
  CHECK(st.S[0] == doctest::Approx(1.0));
  CHECK(st.T[0] == doctest::Approx(2.0 / 90.0));
  CHECK(neighbour_gap(spec, 1) == doctest::Approx(9.0));
  CHECK(neighbour_gap(spec, 3) == doctest::Approx(90.0));
  CHECK(st.tail_sq[2] == 0.0);
  CHECK_THROWS_AS(SeriesSpec::from_lists({1, 1}, {1, 1}), std::invalid_argument);
}

TEST_CASE("kappa bounds") {
  const SeriesSpec single = SeriesSpec::from_lists({1}, {1});
  const BoundReport one = kappa_bound(single, 1);
  CHECK(one.kappa <= 4.0 * std::numbers::pi + 1e-12);

  const SeriesSpec sq = SeriesSpec::power_law(2, 1.0);
  KappaOptions ko;
  ko.st.sum_to = 200000;
  const BoundReport r = kappa_bound(sq, 20000, ko);
  CHECK(std::isfinite(r.kappa));
  CHECK(r.bounded_on_grid);
  CHECK(r.epsilon_grid.size() == r.kappa_eps.size());
  CHECK(r.argmin_N.size() == r.kappa_eps.size());
  for (std::size_t i = 0; i < r.kappa_eps.size(); ++i) {
    CHECK(r.kappa_eps[i] <= r.heuristic_value[i]);
    CHECK(r.kappa_eps[i] == doctest::Approx(kappa_term(r, r.argmin_N[i], r.epsilon_grid[i])));
  }
  const BoundReport tw = kappa_bound(sq.with_twist(TwistKind::RandomPhase, 9), 20000, ko);
  CHECK(tw.kappa == r.kappa);
  CHECK(tw.kappa_eps == r.kappa_eps);

  const BoundReport lac = kappa_bound(SeriesSpec::lacunary(2, 1.0), 500, ko);
  CHECK(std::isfinite(lac.kappa));

  SeriesSpec bare = sq;
  bare.tail_T_majorant = nullptr;
  CHECK_THROWS_AS(kappa_bound(bare, 10, ko), MissingMajorant);
}

TEST_CASE("block statistic") {
  CHECK(fefferman_stat(std::vector<double>(50, 0.0), 3) == 0.0);
  std::vector<double> a(40, 0.0);
  a[1] = 1.0;
  for (std::size_t N : {1u, 2u, 7u, 100u}) CHECK(fefferman_stat(a, N) == doctest::Approx(1.0));
  std::vector<double> sq(1'000'001, 0.0);
  for (std::size_t n = 1; n <= 1000; ++n) sq[n * n] = 1.0 / static_cast<double>(n);
  CHECK(fefferman_stat(sq, 1) == doctest::Approx(1.6439345666815615).epsilon(1e-12));
}

TEST_CASE("gap parameter") {
  const GapDelta d2 = gap_delta(SeriesSpec::power_law(2, 1.0), 1);
  CHECK(d2.delta == doctest::Approx(2.0));
  CHECK(gap_delta(SeriesSpec::power_law(3, 1.0), 1).delta == doctest::Approx(3.0));
  CHECK(gap_delta(SeriesSpec::power_law(1, 1.0), 1).delta == doctest::Approx(1.0));
  CHECK(norm_limit_bound(1.0) == doctest::Approx(3.0 * std::cbrt(12.0 * std::numbers::pi)));
  CHECK(norm_limit_bound(2.0) == doctest::Approx(5.0292).epsilon(1e-3));
}

TEST_CASE("Hilbert inequality checker") {
  const HilbertResult one = hilbert_check({3.0}, {1.0}, {{2.0, 1.0}});
  CHECK(one.lhs_modulus == 0.0);
  CHECK(one.holds);
  const HilbertResult two = hilbert_check({0.0, 1.0}, {1.0, 1.0}, {{1.0, 0.0}, {1.0, 0.0}});
  CHECK(two.lhs_modulus == 0.0);
  CHECK(two.rhs == doctest::Approx(3.0 * std::numbers::pi));
  CHECK_THROWS_AS(hilbert_check({0.0, 0.5}, {1.0, 1.0}, {{1, 0}, {1, 0}}), SeparationViolated);
  for (std::uint64_t i = 0; i < 100; ++i) {
    rng::Stream s(4, i);
    std::vector<double> lam;
    std::vector<std::complex<double>> w;
    double x = 0;
    for (int r = 0; r < 30; ++r) {
      x += 1.0 + std::floor(5.0 * s.unit());
      lam.push_back(x);
      w.emplace_back(s.unit() - 0.5, s.unit() - 0.5);
    }
    CHECK(hilbert_check(lam, std::vector<double>(30, 1.0), w).holds);
  }
}

TEST_CASE("empirical mean oscillation") {
  const SeriesSpec ex = SeriesSpec::from_lists({1}, {1});
  CHECK(empirical_norm_I(ex, 0.0, 1.0).norm == doctest::Approx(1.0).epsilon(1e-6));
  // short interval: |e(x) - mean| is about 2 pi |x - mid|
  CHECK(empirical_norm_I(ex, 0.3, 1e-3).norm == doctest::Approx(std::numbers::pi * 1e-3 / 2.0).epsilon(1e-3));

  const SeriesSpec sq = SeriesSpec::power_law(2, 1.0);
  KappaOptions ko;
  ko.grid_points = 6;
  ko.refine_points = 0;
  ko.st.sum_to = 200000;
  const BoundReport r = kappa_bound(sq, 20000, ko);
  NormConfig nc;
  nc.fft_log2 = 18;
  NormEvaluator ev(sq, nc);
  NormEvaluator twisted(sq.with_twist(TwistKind::RandomSign, 3), nc);
  for (std::size_t i = 0; i < r.epsilon_grid.size(); ++i) {
    const double eps = r.epsilon_grid[i];
    if (eps >= 1e-2) continue;
    for (std::uint64_t k = 0; k < 2; ++k) {
      const double x0 = rng::keyed_unit(17, i, k);
      CHECK(ev.norm(x0, eps).norm <= r.kappa_eps[i] + 1e-3);
      CHECK(twisted.norm(x0, eps).norm <= r.kappa);
    }
  }
}
