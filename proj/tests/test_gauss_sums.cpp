#include "doctest.h"

#include "weylab/gauss_sums.hpp"
#include "weylab/rng.hpp"

#include <cmath>
#include <numeric>

using namespace weylab;

TEST_CASE("direct sums of small moduli") {
  auto v = gauss_sum_direct(1, 1);
  CHECK(v.re == doctest::Approx(1.0));
  CHECK(v.im == doctest::Approx(0.0));
  v = gauss_sum_direct(1, 2);
  CHECK(std::abs(v.value()) < 1e-12);
  v = gauss_sum_direct(1, 3);
  CHECK(v.re == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v.im == doctest::Approx(1.0));
  v = gauss_sum_direct(1, 4);
  CHECK(v.re == doctest::Approx(1.0));
  CHECK(v.im == doctest::Approx(1.0));
  CHECK(v.mod_sq() == doctest::Approx(2.0));
}

TEST_CASE("modulus classes") {
  CHECK(gauss_modulus_class(4) == 2);
  CHECK(gauss_modulus_class(3) == 1);
  CHECK(gauss_modulus_class(2) == 0);
  CHECK(classify(12) == QClass::FourDivides);
  CHECK(classify(9) == QClass::Odd);
  CHECK(classify(6) == QClass::TwoModFour);
}

TEST_CASE("closed form against direct summation") {
  for (auto [p, q] : {std::pair{1, 4}, {1, 2}, {3, 5}, {7, 12}, {5, 8}, {11, 30}}) {
    const auto d = gauss_sum_direct(p, q);
    const auto f = gauss_sum_fast(p, q);
    CHECK(std::abs(d.re - f.re) < 1e-9);
    CHECK(std::abs(d.im - f.im) < 1e-9);
  }
  const auto z = gauss_sum_fast(3, 10);
  CHECK(z.re == 0.0);
  CHECK(z.im == 0.0);
}

TEST_CASE("fast and direct agree on random pairs") {
  for (std::uint64_t i = 0; i < 400; ++i) {
    const long q = 1 + static_cast<long>(rng::keyed(3, i, 0) % 100000);
    long p = static_cast<long>(rng::keyed(3, i, 1) % static_cast<std::uint64_t>(q));
    while (std::gcd(p, q) != 1) p = (p + 1) % q;
    const auto d = gauss_sum_direct(p, q);
    const auto f = gauss_sum_fast(p, q);
    REQUIRE(std::abs(d.re - f.re) <= 1e-9);
    REQUIRE(std::abs(d.im - f.im) <= 1e-9);
  }
}

TEST_CASE("classification holds exhaustively for q up to 300") {
  for (long q = 1; q <= 300; ++q) {
    for (long p = 0; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      REQUIRE(std::abs(gauss_sum_direct(p, q).mod_sq() - gauss_modulus_class(q)) <= 1e-6);
    }
  }
}

TEST_CASE("periodicity in p and large moduli") {
  const auto a = gauss_sum_fast(3, 7);
  const auto b = gauss_sum_fast(10, 7);
  CHECK(a.re == doctest::Approx(b.re));
  CHECK(a.im == doctest::Approx(b.im));
  const mpz_class big("340282366920938463463374607431768211297");  // odd
  const auto g = gauss_sum_fast(mpz_class(12345), big);
  CHECK(g.mod_sq() == doctest::Approx(1.0));
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS(gauss_sum_fast(2, 4));
  CHECK_THROWS(gauss_sum_fast(1, 0));
}
