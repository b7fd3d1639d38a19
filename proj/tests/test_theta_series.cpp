#include "doctest.h"

#include "weylab/cf_engine.hpp"
#include "weylab/gauss_sums.hpp"
#include "weylab/theta_series.hpp"

#include <cmath>
#include <numbers>

using namespace weylab;

namespace {

// long double reference with exact phase reduction
cplx reference_sum(long a, long b, long N) {
  long double re = 0, im = 0;
  for (long n = 1; n <= N; ++n) {
    const long r = static_cast<long>((static_cast<__int128>(n) * n * a) % b);
    const long double t = 2.0L * std::numbers::pi_v<long double> * r / b;
    re += std::cos(t) / n;
    im += std::sin(t) / n;
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

Rational point_in_quarter(std::uint64_t i) {
  return sample_uniform(fundamental_interval(Rational(1, 4)), 2024, i);
}

}  // namespace

TEST_CASE("naive partial sums") {
  CHECK(std::abs(f_partial_naive(Rational(1, 3), 0).value) == 0.0);
  CHECK(f_partial_naive(Rational(0, 1), 3).value.real() == doctest::Approx(11.0 / 6.0));
  const cplx v = f_partial_naive(Rational(1, 2), 2).value;
  CHECK(v.real() == doctest::Approx(-0.5));
  CHECK(std::abs(v.imag()) < 1e-15);
  const Rational x(123457, 1000003);
  const cplx ref = reference_sum(123457, 1000003, 200000);
  const EvalResult r = f_partial_naive(x, 200000);
  CHECK(std::abs(r.value - ref) <= r.error_bound + 1e-12);
  CHECK(r.method == EvalMethod::Naive);
}

TEST_CASE("naive summation is independent of threads and checkpoints") {
  const Rational x = point_in_quarter(1);
  NaiveOptions one, four;
  four.threads = 4;
  const std::uint64_t N = 700001;
  const cplx a = f_partial_naive(x, N, one).value;
  const cplx b = f_partial_naive(x, N, four).value;
  CHECK(a.real() == b.real());
  CHECK(a.imag() == b.imag());
  const std::vector<std::uint64_t> cps{1, 65535, 65536, 65537, 300000, N};
  const auto got = f_partial_naive_checkpoints(x, cps, four);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const cplx s = f_partial_naive(x, cps[i]).value;
    CHECK(got[i].real() == s.real());
    CHECK(got[i].imag() == s.imag());
  }
}

TEST_CASE("naive cap") {
  NaiveOptions o;
  o.cap = 10;
  CHECK_THROWS_AS(f_partial_naive(Rational(1, 3), 11, o), CapExceeded);
}

TEST_CASE("Weyl sums") {
  CHECK(std::abs(weyl_sum_naive(Rational(1, 5), 7, 7)) == 0.0);
  CHECK(weyl_sum_naive(Rational(0, 1), 0, 5).real() == doctest::Approx(5.0));
  const cplx w = weyl_sum_naive(Rational(1, 4), 0, 4);
  CHECK(w.real() == doctest::Approx(2.0));
  CHECK(w.imag() == doctest::Approx(2.0));
}

TEST_CASE("Fresnel segments") {
  // int_0^b e(h t^2) dt -> e(1/8)/(2 sqrt(2h)) as b grows
  const double h = 1e-3;
  const cplx lim = std::polar(1.0, std::numbers::pi / 4) / (2.0 * std::sqrt(2.0 * h));
  const cplx got = fresnel_segment(h, 0.0, 1e5);
  CHECK(std::abs(got - lim) < 2e-3);
  // conjugate symmetry
  const cplx a = fresnel_segment(2e-4, 3.0, 400.0);
  const cplx b = fresnel_segment(-2e-4, 3.0, 400.0);
  CHECK(std::abs(a - std::conj(b)) < 1e-10);
  // h = 0: plain length
  CHECK(std::abs(fresnel_segment(0.0, 2.0, 5.0) - cplx(3.0, 0.0)) < 1e-12);
  // short segment against a midpoint rule
  cplx mid{0, 0};
  const int K = 200000;
  for (int i = 0; i < K; ++i) {
    const double t = 10.0 + (i + 0.5) * 90.0 / K;
    mid += std::polar(1.0, 2.0 * std::numbers::pi * 1e-3 * t * t);
  }
  mid *= 90.0 / K;
  CHECK(std::abs(fresnel_segment(1e-3, 10.0, 100.0) - mid) < 1e-6);
}

TEST_CASE("renormalized Weyl sums match naive sums") {
  std::size_t checked = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const PointExpansion e = PointExpansion::of(point_in_quarter(i));
    for (std::size_t j = 2; j + 1 < e.size(); ++j) {
      if (e.q(j) < 50 || e.q(j + 1) > 8'000'000) continue;
      const BlockContext ctx = BlockContext::make(e, j);
      const std::uint64_t m = e.q(j).get_ui();
      const std::uint64_t N = e.q(j + 1).get_ui() / 8;
      if (N <= m) continue;
      const cplx naive = weyl_sum_naive(e.x, m, N);
      const EvalResult r = weyl_sum_renormalized(ctx, m, N);
      CHECK(std::abs(naive - r.value) <= 5.0 * std::sqrt(e.q(j).get_d()));
      ++checked;
      break;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("block law degenerate cases") {
  const PointExpansion e = PointExpansion::of(point_in_quarter(3));
  const BlockContext ctx = BlockContext::make(e, 3);
  CHECK(ctx.h_scaled > 0.5);
  CHECK(ctx.h_scaled <= 1.0);
  const mpz_class m = e.q(4) - 1;
  if (m * m >= e.q(3) * e.q(4)) CHECK(std::abs(block_sum_renormalized(ctx, m).value) == 0.0);
  const std::uint64_t a = e.q(3).get_ui();
  if (8 * a <= e.q(4)) CHECK(std::abs(weyl_sum_renormalized(ctx, a, a).value) == 0.0);
}

TEST_CASE("block law against naive block sums on I_{1/3}") {
  const auto I = fundamental_interval(Rational(1, 3));
  std::size_t checked = 0;
  for (std::uint64_t i = 0; i < 40; ++i) {
    const PointExpansion e = PointExpansion::of(sample_uniform(I, 99, i));
    for (std::size_t j = 2; j + 1 < e.size(); ++j) {
      if (e.q(j) < 100 || e.q(j + 1) > 3'000'000) continue;
      const BlockContext ctx = BlockContext::make(e, j);
      const std::uint64_t lo = e.q(j).get_ui(), hi = e.q(j + 1).get_ui();
      const cplx naive = f_partial_naive(e.x, hi - 1).value - f_partial_naive(e.x, lo - 1).value;
      const cplx main = block_sum_renormalized(ctx, e.q(j)).value;
      CHECK(std::abs(naive - main) <= 5.0 / std::sqrt(e.q(j).get_d()));
      if (classify(e.q(j)) == QClass::TwoModFour) CHECK(std::abs(main) == 0.0);
      ++checked;
    }
  }
  CHECK(checked > 40);
}

TEST_CASE("hybrid evaluation") {
  const PointExpansion e = PointExpansion::of(point_in_quarter(7));
  HybridOptions opt;
  opt.threshold = 1000;
  std::size_t J = 0;
  for (std::size_t j = 1; j < e.size(); ++j) {
    if (e.q(j) <= 2'000'000) J = j;
  }
  opt.target = e.q(J);
  const EvalResult h = f_eval_hybrid(e, opt);
  const EvalResult n = f_partial_naive(e.x, e.q(J).get_ui());
  CHECK(std::abs(h.value - n.value) <= h.error_bound);
  CHECK(h.terms_used < n.terms_used);

  // threshold past every denominator: plain naive sum
  const PointExpansion small = PointExpansion::of(Rational(13, 1597));
  HybridOptions big;
  big.threshold = 1u << 20;
  big.target = mpz_class(5000);
  const EvalResult hs = f_eval_hybrid(small, big);
  const EvalResult ns = f_partial_naive(small.x, 5000);
  CHECK(hs.value.real() == ns.value.real());
  CHECK(hs.value.imag() == ns.value.imag());

  // doubling T shrinks the bound by about sqrt 2
  HybridOptions t1, t2;
  t1.threshold = 2000;
  t2.threshold = 4000;
  const double b1 = hybrid_error_bound(e, t1), b2 = hybrid_error_bound(e, t2);
  CHECK(b1 / b2 >= std::sqrt(2.0) * 0.9);
}

TEST_CASE("proxy series") {
  // golden ratio: bounded terms, tail below 1e-3 after 40 terms
  const auto cf = synthetic_cf(rules::constant(1), 80);
  const auto rep = convergence_report(cf, 70);
  CHECK(rep.verdict == Verdict::ConvergesAbsolutely);
  const auto conv = convergents(cf);
  const ProxyTrace tr = proxy_series(conv, 70);
  double tail = 0.0;
  for (std::size_t j = 40; j < 70; ++j) tail += std::abs(tr.terms[j]);
  CHECK(tail <= 1e-3);
  for (std::size_t j = 1; j <= 70; ++j) {
    if (classify(conv.entries[j].q) == QClass::TwoModFour) CHECK(std::abs(tr.terms[j - 1]) == 0.0);
    if (classify(conv.entries[j].q) == QClass::Odd) {
      const double bound = 0.5 / std::sqrt(conv.entries[j].q.get_d()) *
                           std::log(conv.entries[j + 1].q.get_d() / conv.entries[j].q.get_d());
      CHECK(std::abs(tr.terms[j - 1]) == doctest::Approx(bound).epsilon(1e-9));
    }
  }
  // tower: terms grow like sqrt(q_j)
  const auto tower = synthetic_cf(rules::tower(), 3);
  CHECK(convergence_report(tower, 2).verdict == Verdict::Diverges);
}

TEST_CASE("rational points diverge logarithmically") {
  const std::vector<std::uint64_t> grid{1000, 3000, 10000, 30000, 100000, 300000};
  for (auto [p, q] : {std::pair{0, 1}, {1, 3}, {1, 4}}) {
    const DivergenceFit fit = rational_divergence_slope(p, q, grid);
    CHECK(std::abs(fit.slope / fit.predicted - 1.0) < 0.2);
  }
}
