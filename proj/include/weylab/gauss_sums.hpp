#pragma once

// Normalized quadratic Gauss sums theta_{p/q} = q^{-1/2} sum_{n<q} e(p n^2 / q).

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <string_view>

namespace weylab {

inline constexpr std::uint64_t kDefaultDirectCap = 10'000'000;

enum class QClass { FourDivides, Odd, TwoModFour };

std::string_view to_string(QClass c);

struct GaussSumValue {
  double re = 0.0;
  double im = 0.0;
  QClass q_class = QClass::Odd;
  int claimed_mod_sq = 1;

  std::complex<double> value() const { return {re, im}; }
  double mod_sq() const { return re * re + im * im; }
};

QClass classify(const mpz_class& q);

/// |theta_{p/q}|^2: 2 if 4 | q, 1 if q is odd, 0 otherwise.
int gauss_modulus_class(const mpz_class& q);

/// Ground truth by summation over n < q with exact reduction of p n^2 mod q.
/// Throws std::domain_error when q exceeds `cap` or gcd(p, q) != 1.
GaussSumValue gauss_sum_direct(const mpz_class& p, const mpz_class& q,
                               std::uint64_t cap = kDefaultDirectCap);

/// Closed form via the 2-adic split q = 2^k m and Jacobi symbols; the
/// result is exact (components in {-1, 0, 1}).
GaussSumValue gauss_sum_fast(const mpz_class& p, const mpz_class& q);

/// e(t) = exp(2 pi i t).
std::complex<double> unit_phase(double t);

}  // namespace weylab
