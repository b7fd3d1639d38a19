#pragma once

#include "weylab/cf_engine.hpp"

#include <gmp.h>

#include <complex>
#include <cstdint>
#include <vector>

namespace weylab {

/// Walks n -> n+1 keeping r_n = n^2 num mod den exactly, using
/// r_{n+1} = r_n + d_n, d_n = (2n+1) num (both mod den). Limb arithmetic
/// only; no divisions in the hot loop.
class QuadraticPhaseWalker {
 public:
  QuadraticPhaseWalker(const Rational& x, std::uint64_t n0);

  std::uint64_t n() const { return n_; }
  /// r_n / den in [0, 1).
  double phase() const {
    const std::size_t L = den_.size();
    if (L == 1) return static_cast<double>(r_[0]) * inv_top_;
    const double top = static_cast<double>(r_[L - 1]) * 0x1.0p64 + static_cast<double>(r_[L - 2]);
    return top * inv_top_;
  }
  void advance() {
    const std::size_t L = den_.size();
    mp_limb_t carry = mpn_add_n(r_.data(), r_.data(), d_.data(), L);
    if (carry || mpn_cmp(r_.data(), den_.data(), L) >= 0) mpn_sub_n(r_.data(), r_.data(), den_.data(), L);
    carry = mpn_add_n(d_.data(), d_.data(), dd_.data(), L);
    if (carry || mpn_cmp(d_.data(), den_.data(), L) >= 0) mpn_sub_n(d_.data(), d_.data(), den_.data(), L);
    ++n_;
  }
  /// Current exact residue n^2 num mod den.
  mpz_class residue() const;

 private:
  std::vector<mp_limb_t> den_;
  std::vector<mp_limb_t> r_;
  std::vector<mp_limb_t> d_;
  std::vector<mp_limb_t> dd_;
  double inv_top_ = 0.0;
  std::uint64_t n_ = 0;
};

}  // namespace weylab
