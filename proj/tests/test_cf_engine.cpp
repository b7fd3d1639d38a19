#include "doctest.h"

#include "weylab/cf_engine.hpp"
#include "weylab/rng.hpp"

#include <cmath>
#include <numeric>

using namespace weylab;

namespace {

std::vector<long> as_longs(const ContinuedFraction& cf) {
  std::vector<long> v;
  for (const auto& a : cf.quotients) v.push_back(a.get_si());
  return v;
}

mpz_class random_below_bits(std::uint64_t seed, std::uint64_t index, unsigned bits) {
  mpz_class v = 0;
  for (unsigned w = 0; w * 64 < bits; ++w) {
    v <<= 64;
    v += mpz_class(std::to_string(rng::keyed(seed, index, w)));
  }
  return v >> ((bits + 63) / 64 * 64 - bits);
}

}  // namespace

TEST_CASE("rational parsing and reduction") {
  const Rational r = Rational::parse("6/8");
  CHECK(r.num() == 3);
  CHECK(r.den() == 4);
  CHECK(Rational::parse("0/5") == Rational(0, 1));
  CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
  CHECK(Rational(1, 3).in_unit_interval());
  CHECK_FALSE(Rational(1, 1).in_unit_interval());
}

TEST_CASE("expansions of small rationals") {
  CHECK(as_longs(cf_of_rational(Rational(0, 1))) == std::vector<long>{0});
  CHECK(as_longs(cf_of_rational(Rational(1, 2))) == std::vector<long>{0, 2});
  CHECK(as_longs(cf_of_rational(Rational(113, 355))) == std::vector<long>{0, 3, 7, 16});
  CHECK(as_longs(cf_of_rational(Rational(113, 355), CfConvention::LastIsOne)) ==
        std::vector<long>{0, 3, 7, 15, 1});
  CHECK(as_longs(cf_of_rational(Rational(0, 1), CfConvention::LastIsOne)) == std::vector<long>{0});
}

TEST_CASE("convergents") {
  ContinuedFraction cf;
  cf.quotients = {0, 2};
  auto c = convergents(cf);
  REQUIRE(c.entries.size() == 2);
  CHECK(c.entries[0].p == 0);
  CHECK(c.entries[0].q == 1);
  CHECK(c.entries[1].p == 1);
  CHECK(c.entries[1].q == 2);

  cf.quotients = {0, 1, 1, 1, 1, 1};
  c = convergents(cf);
  const long fib[] = {1, 1, 2, 3, 5, 8};
  for (std::size_t j = 0; j < 6; ++j) CHECK(c.entries[j].q == fib[j]);

  c = convergents(cf_of_rational(Rational(113, 355)));
  const long p[] = {0, 1, 7, 113}, q[] = {1, 3, 22, 355};
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(c.entries[j].p == p[j]);
    CHECK(c.entries[j].q == q[j]);
  }
}

TEST_CASE("determinant identity and round trip on random rationals") {
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const mpz_class den = random_below_bits(11, i, 256) + 1;
    const mpz_class num = random_below_bits(12, i, 256) % den;
    const Rational x(num, den);
    const auto cf = cf_of_rational(x);
    const auto c = convergents(cf);
    REQUIRE(c.entries.size() == cf.quotients.size());
    CHECK(Rational(c.entries.back().p, c.entries.back().q) == x);
    CHECK(rational_of_cf(cf) == x);
    for (std::size_t j = 1; j < c.entries.size(); ++j) {
      const mpz_class det = c.entries[j].p * c.entries[j - 1].q - c.entries[j - 1].p * c.entries[j].q;
      CHECK(det == ((j - 1) % 2 == 0 ? 1 : -1));
    }
    // 1/2 < |x - p_j/q_j| q_j q_{j+1} < 1 except at the last step
    for (std::size_t j = 1; j + 2 < c.entries.size(); ++j) {
      const mpq_class h = x.to_mpq() - mpq_class(c.entries[j].p, c.entries[j].q);
      const mpq_class s = abs(h) * c.entries[j].q * c.entries[j + 1].q;
      CHECK(s > mpq_class(1, 2));
      CHECK(s < 1);
    }
  }
}

TEST_CASE("fundamental intervals") {
  auto I = fundamental_interval(Rational(1, 2));
  CHECK(I.lo == Rational(1, 3));
  CHECK(I.hi == Rational(1, 2));
  CHECK(I.length() == Rational(1, 6));
  I = fundamental_interval(Rational(1, 3));
  CHECK(I.lo == Rational(1, 4));
  CHECK(I.hi == Rational(1, 3));
  CHECK(I.length() == Rational(1, 12));
  ContinuedFraction pre;
  pre.quotients = {0, 1};
  I = fundamental_interval_of_prefix(pre);
  CHECK(I.lo == Rational(1, 2));
  CHECK(I.hi == Rational(1, 1));
  CHECK(I.length() == Rational(1, 2));
}

TEST_CASE("interval lengths for every q up to 2000") {
  for (long q = 2; q <= 2000; ++q) {
    for (long p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const auto I = fundamental_interval(Rational(p, q));
      const mpq_class len = I.length().to_mpq();
      REQUIRE(len > mpq_class(1, 2 * q * q));
      REQUIRE(len <= mpq_class(1, q * q));
    }
  }
}

TEST_CASE("uniform samples stay inside and extend the prefix") {
  const auto I = fundamental_interval(Rational(1, 2));
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const Rational x = sample_uniform(I, 5, i);
    REQUIRE(I.contains(x));
    const auto a = cf_prefix(x, 2);
    REQUIRE(a.size() == 2);
    CHECK(a[1] == 2);
  }
  CHECK(sample_uniform(I, 5, 17) == sample_uniform(I, 5, 17));
  CHECK_FALSE(sample_uniform(I, 5, 17) == sample_uniform(I, 6, 17));
}

TEST_CASE("synthetic quotient rules") {
  auto cf = synthetic_cf(rules::constant(1), 30);
  auto c = convergents(cf);
  mpz_class f0 = 1, f1 = 1;
  for (std::size_t j = 2; j < c.entries.size(); ++j) {
    const mpz_class f2 = f0 + f1;
    CHECK(c.entries[j].q == f2);
    f0 = f1;
    f1 = f2;
  }
  cf = synthetic_cf(rules::squares(), 10);
  for (std::size_t j = 1; j < cf.quotients.size(); ++j) CHECK(cf.quotients[j] == j * j);

  cf = synthetic_cf(rules::tower(), 3);
  c = convergents(cf, cf.size());
  // q_1 = 10, q_2 = a_2 q_1 + 1 with a_2 = ceil(10^10 / 10)
  REQUIRE(c.size() >= 3);
  CHECK(c.log_q(1) == doctest::Approx(std::log(10.0)));
  CHECK(std::abs(c.log_q(2) - 10 * std::log(10.0)) < std::log(2.0));
}
