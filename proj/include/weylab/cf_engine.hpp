#pragma once

// Exact continued-fraction arithmetic over GMP integers: expansions,
// convergents (with a log-scale tail once denominators outgrow the bit
// budget), fundamental intervals and seeded sampling inside them.

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace weylab {

/// Default cap on the size of an exact convergent denominator, in bits.
inline constexpr std::size_t kDefaultBitBudget = std::size_t{1} << 20;

/// Default resolution of the sampling grid used by sample_uniform.
inline constexpr unsigned kDefaultGridBits = 256;

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reduced fraction num/den with den >= 1.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(mpz_class num, mpz_class den);
  Rational(long num, unsigned long den) : Rational(mpz_class(num), mpz_class(den)) {}

  /// Parses "num/den" (or a bare integer). Throws std::invalid_argument.
  static Rational parse(std::string_view text);

  const mpz_class& num() const { return num_; }
  const mpz_class& den() const { return den_; }

  double to_double() const;
  std::string to_string() const;
  mpq_class to_mpq() const;

  /// True when 0 <= value < 1.
  bool in_unit_interval() const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }

 private:
  mpz_class num_;
  mpz_class den_;
};

Rational operator-(const Rational& a, const Rational& b);

enum class CfConvention {
  LastNotOne,  ///< finite expansions end in a quotient != 1 (Euclid's output)
  LastIsOne,   ///< finite expansions end in 1: [..., a] becomes [..., a-1, 1]
};

std::string_view to_string(CfConvention c);
CfConvention parse_convention(std::string_view text);

/// A partial quotient too large to hold exactly. Only its natural log and,
/// when the generator can supply it, its residue mod 4 are kept.
struct LogQuotient {
  double log_value = 0.0;
  int residue4 = -1;  // -1: unknown
};

struct ContinuedFraction {
  std::vector<mpz_class> quotients;  // [a_0; a_1, ...], exact part
  std::vector<LogQuotient> log_tail;  // quotients past the exact part
  CfConvention convention = CfConvention::LastNotOne;

  std::size_t size() const { return quotients.size() + log_tail.size(); }
  bool exact() const { return log_tail.empty(); }
  std::string to_string() const;
};

struct Convergent {
  mpz_class p;
  mpz_class q;
};

/// Log-scale convergent: p_j, q_j only known through their logarithms.
struct LogConvergent {
  double log_p = 0.0;
  double log_q = 0.0;
  int q_residue4 = -1;  // q_j mod 4 when derivable, else -1
};

struct ConvergentSeq {
  std::vector<Convergent> entries;      // j = 0, 1, ... exact
  std::vector<LogConvergent> log_tail;  // continues after entries.back()

  std::size_t size() const { return entries.size() + log_tail.size(); }
  /// log q_j for any index, exact or log-scale.
  double log_q(std::size_t j) const;
  /// q_j mod 4, or -1 when unknown.
  int q_residue4(std::size_t j) const;
  bool is_exact(std::size_t j) const { return j < entries.size(); }
};

enum class BudgetPolicy { LogScale, Throw };

/// Euclidean expansion of x in [0,1). 0 maps to [0] under both conventions.
ContinuedFraction cf_of_rational(const Rational& x,
                                 CfConvention convention = CfConvention::LastNotOne);

/// First `count` partial quotients a_0..a_{count-1} of x (fewer if the
/// expansion is shorter). Convention LastNotOne.
std::vector<mpz_class> cf_prefix(const Rational& x, std::size_t count);

/// Reassembles the value of an exact continued fraction.
Rational rational_of_cf(const ContinuedFraction& cf);

/// Convergents p_j/q_j for j < J. Once a denominator exceeds `bit_budget`
/// bits the remainder is tracked in log scale, or BudgetExceeded is thrown
/// when policy is Throw.
ConvergentSeq convergents(const ContinuedFraction& cf, std::size_t J,
                          std::size_t bit_budget = kDefaultBitBudget,
                          BudgetPolicy policy = BudgetPolicy::LogScale);
ConvergentSeq convergents(const ContinuedFraction& cf);

/// Set of x whose expansion begins with `prefix` (the open interval between
/// p/q and (p+p')/(q+q')).
struct FundamentalInterval {
  ContinuedFraction prefix;
  Rational lo;
  Rational hi;
  mpz_class q;
  mpz_class q_prev;

  Rational length() const;
  /// 1-based length j_0 of the prefix (a_0 excluded).
  std::size_t depth() const { return prefix.quotients.size() - 1; }
  bool contains(const Rational& x) const { return lo < x && x < hi; }
};

FundamentalInterval fundamental_interval(const Rational& p_over_q,
                                         CfConvention convention = CfConvention::LastNotOne);
FundamentalInterval fundamental_interval_of_prefix(const ContinuedFraction& prefix);

/// An open interval carrying the denominator of the fundamental interval
/// that contains it (used for sub-interval experiments).
struct SampleInterval {
  Rational lo;
  Rational hi;
  mpz_class q;
  std::size_t depth = 0;

  static SampleInterval of(const FundamentalInterval& I) {
    return {I.lo, I.hi, I.q, I.depth()};
  }
  Rational length() const { return hi - lo; }
};

/// lo + u (hi - lo) / 2^grid_bits with u uniform in [1, 2^grid_bits - 1],
/// keyed on (seed, index) only.
Rational sample_uniform(const SampleInterval& I, std::uint64_t seed, std::uint64_t index,
                        unsigned grid_bits = kDefaultGridBits);
Rational sample_uniform(const FundamentalInterval& I, std::uint64_t seed, std::uint64_t index,
                        unsigned grid_bits = kDefaultGridBits);

/// What a quotient generator sees when producing a_j.
struct GeneratorState {
  std::size_t j = 0;                  // index of the quotient being produced
  const ConvergentSeq* so_far = nullptr;  // convergents 0..j-1
  std::size_t bit_budget = kDefaultBitBudget;
};

/// A generated quotient: exact when small enough, otherwise log-scale.
struct GeneratedQuotient {
  std::optional<mpz_class> exact;
  LogQuotient approx;

  static GeneratedQuotient of(mpz_class v);
};

using QuotientRule = std::function<std::optional<GeneratedQuotient>(const GeneratorState&)>;

/// Materializes a_0 = 0 followed by up to J generated quotients. The rule
/// may stop early by returning nullopt (e.g. when it can no longer be
/// evaluated in log scale).
ContinuedFraction synthetic_cf(const QuotientRule& rule, std::size_t J,
                               std::size_t bit_budget = kDefaultBitBudget);

namespace rules {
QuotientRule constant(unsigned long a);
/// a_j = j^2
QuotientRule squares();
/// a_1 = first, then a_{j+1} = ceil(10^{q_j} / q_j).
QuotientRule tower(unsigned long first = 10);
}  // namespace rules

/// Bits of an exact integer (0 for 0).
std::size_t bit_length(const mpz_class& v);

}  // namespace weylab
