#include "doctest.h"

#include "weylab/oscillation_lab.hpp"

#include <cmath>
#include <numbers>

using namespace weylab;

namespace {

cplx e_of(double t) { return std::polar(1.0, 2.0 * std::numbers::pi * t); }

SampleInterval quarter() { return SampleInterval::of(fundamental_interval(Rational(1, 4))); }

}  // namespace

TEST_CASE("constant integrand") {
  const MeanEstimate m = estimate_F_I(quarter(), 500, 1, {}, [](const Rational&) { return cplx(1.0, 0.0); });
  CHECK(m.mean.real() == 1.0);
  CHECK(m.mean.imag() == 0.0);
  CHECK(m.std_error == 0.0);
  CHECK_THROWS_AS(estimate_F_I(quarter(), 99, 1, {}, [](const Rational&) { return cplx(1.0, 0.0); }),
                  std::invalid_argument);
}

TEST_CASE("mean of e(x) over I_{1/2} matches the exact integral") {
  const auto I = SampleInterval::of(fundamental_interval(Rational(1, 2)));
  const MeanEstimate m = estimate_F_I(I, 10000, 8, {}, [](const Rational& x) { return e_of(x.to_double()); });
  const cplx exact = (e_of(0.5) - e_of(1.0 / 3.0)) / (cplx(0.0, 2.0 * std::numbers::pi) / 6.0);
  CHECK(std::abs(m.mean - exact) <= 3.0 * m.std_error);
}

TEST_CASE("independent seeds agree on I_{1/4}") {
  const MeanEstimate a = estimate_F_I(quarter(), 1500, 101, {});
  const MeanEstimate b = estimate_F_I(quarter(), 1500, 202, {});
  CHECK(std::abs(a.mean - b.mean) <= 3.0 * (a.std_error + b.std_error));
}

TEST_CASE("survival curves") {
  EvalConfig cfg;
  const auto grid = linear_grid(0.0, 6.0, 7);
  const LevelSetEstimate est = level_set_curve(quarter(), grid, 1000, 5, cfg);
  CHECK(est.survival.front() == 1.0);
  CHECK(est.survival.back() == 0.0);
  CHECK(est.ci_halfwidth.back() > 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(static_cast<double>(est.counts[i]) / static_cast<double>(est.samples) == est.survival[i]);
    if (i) CHECK(est.survival[i] <= est.survival[i - 1]);
  }
  cfg.threads = 3;
  const LevelSetEstimate again = level_set_curve(quarter(), grid, 1000, 5, cfg);
  CHECK(again.counts == est.counts);
  CHECK(again.mean.real() == est.mean.real());
  CHECK_THROWS_AS(level_set_curve(quarter(), grid, 999, 5, cfg), std::invalid_argument);
}

TEST_CASE("decay slope of an exact exponential") {
  LevelSetEstimate est;
  est.samples = 1'000'000;
  est.lambda_grid = linear_grid(0.5, 2.0, 16);
  for (double l : est.lambda_grid) {
    est.survival.push_back(std::exp(-3.0 * l));
    est.counts.push_back(static_cast<std::uint64_t>(std::llround(est.survival.back() * 1e6)));
  }
  const SlopeFit fit = decay_slope_fit(est);
  CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.ci_lo < 3.0);
  CHECK(fit.ci_hi > 3.0);
  est.counts.assign(16, 10);
  CHECK_THROWS_AS(decay_slope_fit(est), InsufficientData);
}

TEST_CASE("Wilson interval") {
  CHECK(wilson_halfwidth(0, 100) > 0.0);
  CHECK(wilson_halfwidth(50, 100) == doctest::Approx(0.0942).epsilon(0.01));
}

TEST_CASE("law of the next partial quotient on I_{1/2}") {
  const auto I = fundamental_interval(Rational(1, 2));
  const std::size_t M = 100000;
  const MetricStats st = partial_quotient_histogram(I, 2, M, 77);
  const double sigma = std::sqrt(0.4 * 0.6 / M);
  CHECK(std::abs(st.frequency[0] - 0.4) <= 3.0 * sigma);
  double total = 0.0;
  for (double f : st.frequency) total += f;
  CHECK(total <= 1.0);
  // P(k) and P(4k) differ by about 16
  for (std::size_t k = 1; k <= 5; ++k) {
    const double r = st.frequency[k - 1] / st.frequency[4 * k - 1];
    CHECK(r > 16.0 / 3.0);
    CHECK(r < 16.0 * 3.0);
  }
  CHECK_THROWS_AS(partial_quotient_histogram(I, 1, 10, 1), std::invalid_argument);
}

TEST_CASE("restricted measures") {
  const auto I = fundamental_interval(Rational(1, 2));
  const RestrictedMeasure none = restricted_measure(I, [](std::size_t) { return std::nullopt; }, 5, 1000, 1);
  CHECK(none.deficit == 0.0);
  CHECK(none.S == 0.0);
  const RestrictedMeasure sq = restricted_measure(
      I, [](std::size_t n) { return std::optional<double>(static_cast<double>(n * n)); }, 20, 20000, 2);
  CHECK(sq.ratio >= 0.2);
  CHECK(sq.ratio <= 5.0);
  // a_2 = a_3 = a_4 = 1: roughly three factors of P(a = 1)
  const RestrictedMeasure ones = restricted_measure(
      I, [](std::size_t n) { return n <= 3 ? std::optional<double>(1.0) : std::nullopt; }, 3, 40000, 3);
  const MetricStats st = partial_quotient_histogram(I, 2, 40000, 3);
  CHECK(ones.deficit == doctest::Approx(-3.0 * std::log(st.frequency[0])).epsilon(0.25));
}

TEST_CASE("oscillation proxy") {
  // [0; 4, 1, 1, ...]: compare with the defining sum over reliable convergents
  const Rational x = sample_uniform(fundamental_interval(Rational(1, 4)), 4, 0);
  const ProxyValue v = oscillation_proxy(x, 4);
  const PointExpansion e = PointExpansion::of(x);
  cplx hand{0, 0};
  for (std::size_t j = 1; j < e.reliable_last; ++j) {
    if (e.q(j) < 4) continue;
    hand += gauss_sum_fast(e.p(j), e.q(j)).value() * 0.5 / std::sqrt(e.q(j).get_d()) *
            std::log(e.q(j + 1).get_d() / e.q(j).get_d());
  }
  CHECK(std::abs(v.value - hand) < 1e-9);
  CHECK(v.terms > 0);
}

TEST_CASE("proxy predicts the oscillation on I_{1/4}") {
  const auto I = quarter();
  const MeanEstimate mean = estimate_F_I(I, 2000, 31, {});
  std::size_t ok = 0, total = 0;
  for (std::uint64_t i = 0; i < 40; ++i) {
    const Rational x = sample_uniform(I, 32, i);
    const EvalResult f = f_eval_adaptive(x, {});
    const ProxyValue p = oscillation_proxy(x, 4);
    ++total;
    if (std::abs(p.value - (f.value - mean.mean)) <= 5.0 / 2.0 + 3.0 * mean.std_error) ++ok;
  }
  CHECK(static_cast<double>(ok) >= 0.95 * static_cast<double>(total));
}
