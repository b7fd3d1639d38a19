#include "weylab/gauss_sums.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace weylab {

std::string_view to_string(QClass c) {
  switch (c) {
    case QClass::FourDivides: return "four-divides";
    case QClass::Odd: return "odd";
    case QClass::TwoModFour: return "two-mod-four";
  }
  return "?";
}

QClass classify(const mpz_class& q) {
  const unsigned long r = mpz_fdiv_ui(q.get_mpz_t(), 4);
  if (r == 0) return QClass::FourDivides;
  if (r % 2 == 1) return QClass::Odd;
  return QClass::TwoModFour;
}

int gauss_modulus_class(const mpz_class& q) {
  if (q < 1) throw std::domain_error("gauss_modulus_class expects q >= 1");
  switch (classify(q)) {
    case QClass::FourDivides: return 2;
    case QClass::Odd: return 1;
    case QClass::TwoModFour: return 0;
  }
  return 0;
}

std::complex<double> unit_phase(double t) {
  const double angle = 2.0 * std::numbers::pi * t;
  return {std::cos(angle), std::sin(angle)};
}

namespace {

void check_coprime(const mpz_class& p, const mpz_class& q) {
  if (q < 1) throw std::domain_error("Gauss sum needs q >= 1");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  if (g != 1) throw std::domain_error("Gauss sum needs gcd(p, q) = 1");
}

GaussSumValue with_class(double re, double im, const mpz_class& q) {
  GaussSumValue v;
  v.re = re;
  v.im = im;
  v.q_class = classify(q);
  v.claimed_mod_sq = gauss_modulus_class(q);
  return v;
}

}  // namespace

GaussSumValue gauss_sum_direct(const mpz_class& p, const mpz_class& q, std::uint64_t cap) {
  check_coprime(p, q);
  if (!q.fits_ulong_p() || q.get_ui() > cap) {
    throw std::domain_error("q exceeds the direct-summation cap");
  }
  const std::uint64_t qq = q.get_ui();
  mpz_class pr;
  mpz_fdiv_r(pr.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  const std::uint64_t pm = pr.get_ui();
  // r_n = p n^2 mod q stepped by d_n = p (2n + 1) mod q, d_{n+1} = d_n + 2p.
  std::uint64_t r = 0;
  std::uint64_t d = pm;
  const std::uint64_t dd = (2 * pm) % qq;
  double re = 0.0;
  double im = 0.0;
  const double inv_q = 1.0 / static_cast<double>(qq);
  for (std::uint64_t n = 0; n < qq; ++n) {
    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(r) * inv_q);
    re += std::cos(angle);
    im += std::sin(angle);
    r += d;
    if (r >= qq) r -= qq;
    d += dd;
    if (d >= qq) d -= qq;
  }
  const double norm = 1.0 / std::sqrt(static_cast<double>(qq));
  return with_class(re * norm, im * norm, q);
}

GaussSumValue gauss_sum_fast(const mpz_class& p, const mpz_class& q) {
  check_coprime(p, q);
  if (q == 1) return with_class(1.0, 0.0, q);
  const unsigned long k = mpz_scan1(q.get_mpz_t(), 0);
  if (k == 1) return with_class(0.0, 0.0, q);
  mpz_class m = q;
  mpz_fdiv_q_2exp(m.get_mpz_t(), m.get_mpz_t(), k);

  // Odd part: G(b, m)/sqrt(m) = (b/m) eps_m with eps_m = 1 or i.
  std::complex<int> odd{1, 0};
  if (m > 1) {
    mpz_class b = p;
    mpz_mul_2exp(b.get_mpz_t(), b.get_mpz_t(), k);
    mpz_fdiv_r(b.get_mpz_t(), b.get_mpz_t(), m.get_mpz_t());
    const int jac = mpz_jacobi(b.get_mpz_t(), m.get_mpz_t());
    const bool m_one_mod_four = mpz_fdiv_ui(m.get_mpz_t(), 4) == 1;
    odd = m_one_mod_four ? std::complex<int>{jac, 0} : std::complex<int>{0, jac};
  }

  // 2-power part (k >= 2): G(a, 2^k)/2^{k/2} = (1 + i^a) (2/a)^k, a odd.
  std::complex<int> two{1, 0};
  if (k >= 2) {
    mpz_class a = p * m;
    mpz_fdiv_r_2exp(a.get_mpz_t(), a.get_mpz_t(), k);
    const unsigned long a8 = mpz_fdiv_ui(a.get_mpz_t(), 8);
    const std::complex<int> one_plus = (a8 % 4 == 1) ? std::complex<int>{1, 1}
                                                     : std::complex<int>{1, -1};
    // (2/a) = 1 if a = +-1 mod 8, -1 if a = +-3 mod 8
    const int sym = (a8 == 1 || a8 == 7) ? 1 : -1;
    const int sign = (k % 2 == 1) ? sym : 1;
    two = one_plus * sign;
  }

  const std::complex<int> theta = odd * two;
  return with_class(static_cast<double>(theta.real()), static_cast<double>(theta.imag()), q);
}

}  // namespace weylab
