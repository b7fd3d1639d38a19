#include "weylab/phase_walker.hpp"

namespace weylab {

namespace {

std::vector<mp_limb_t> limbs_of(const mpz_class& v, std::size_t L) {
  std::vector<mp_limb_t> out(L, 0);
  const std::size_t n = mpz_size(v.get_mpz_t());
  for (std::size_t i = 0; i < n && i < L; ++i) out[i] = mpz_getlimbn(v.get_mpz_t(), i);
  return out;
}

}  // namespace

QuadraticPhaseWalker::QuadraticPhaseWalker(const Rational& x, std::uint64_t n0) : n_(n0) {
  const mpz_class& den = x.den();
  const std::size_t L = mpz_size(den.get_mpz_t());
  mpz_class num;
  mpz_fdiv_r(num.get_mpz_t(), x.num().get_mpz_t(), den.get_mpz_t());
  const mpz_class n(static_cast<unsigned long>(n0));
  mpz_class r = n * n * num;
  mpz_class d = (2 * n + 1) * num;
  mpz_class dd = 2 * num;
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), den.get_mpz_t());
  mpz_fdiv_r(d.get_mpz_t(), d.get_mpz_t(), den.get_mpz_t());
  mpz_fdiv_r(dd.get_mpz_t(), dd.get_mpz_t(), den.get_mpz_t());
  den_ = limbs_of(den, L);
  r_ = limbs_of(r, L);
  d_ = limbs_of(d, L);
  dd_ = limbs_of(dd, L);
  // phase() reads the top one or two limbs of r against the same limbs of den
  if (L == 1) {
    inv_top_ = 1.0 / static_cast<double>(den_[0]);
  } else {
    const double top = static_cast<double>(den_[L - 1]) * 0x1.0p64 + static_cast<double>(den_[L - 2]);
    inv_top_ = 1.0 / top;
  }
}

mpz_class QuadraticPhaseWalker::residue() const {
  mpz_class out;
  mpz_import(out.get_mpz_t(), r_.size(), -1, sizeof(mp_limb_t), 0, 0, r_.data());
  return out;
}

}  // namespace weylab
