#include "weylab/cf_engine.hpp"

#include "weylab/rng.hpp"

#include <cmath>
#include <sstream>

namespace weylab {

namespace {

double log_of(const mpz_class& v) {
  if (v <= 0) return -HUGE_VAL;
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

int residue4(const mpz_class& v) {
  return static_cast<int>(mpz_fdiv_ui(v.get_mpz_t(), 4));
}

// log(a + r) for a given as log value, r in [0, 1].
double log_sum(double log_a, double r) {
  if (log_a > 40.0) return log_a + std::log1p(r * std::exp(-log_a));
  return std::log(std::exp(log_a) + r);
}

// Incremental convergent recurrence with a switch to log scale once the
// exact denominators exceed the bit budget.
class ConvergentBuilder {
 public:
  ConvergentBuilder(std::size_t bit_budget, BudgetPolicy policy)
      : budget_(bit_budget), policy_(policy) {}

  const ConvergentSeq& seq() const { return seq_; }

  void push_exact(const mpz_class& a) {
    if (log_mode_) {
      push_log(LogQuotient{log_of(a), residue4(a)});
      return;
    }
    const std::size_t j = seq_.entries.size();
    // p_{-1}/q_{-1} = 1/0, p_{-2}/q_{-2} = 0/1
    const mpz_class p1 = j >= 1 ? seq_.entries[j - 1].p : mpz_class(1);
    const mpz_class q1 = j >= 1 ? seq_.entries[j - 1].q : mpz_class(0);
    const mpz_class p2 = j >= 2 ? seq_.entries[j - 2].p : (j == 1 ? mpz_class(1) : mpz_class(0));
    const mpz_class q2 = j >= 2 ? seq_.entries[j - 2].q : (j == 1 ? mpz_class(0) : mpz_class(1));
    mpz_class p = a * p1 + p2;
    mpz_class q = a * q1 + q2;
    if (bit_length(q) > budget_) {
      if (policy_ == BudgetPolicy::Throw) {
        throw BudgetExceeded("convergent denominator exceeds bit budget of " +
                             std::to_string(budget_) + " bits");
      }
      enter_log_mode();
      append_log(log_of(p), log_of(q), residue4(q),
                 p1 == 0 ? 0.0 : std::exp(log_of(p1) - log_of(p)),
                 std::exp(log_of(q1) - log_of(q)));
      q_prev_res_ = residue4(q1);
      return;
    }
    seq_.entries.push_back({std::move(p), std::move(q)});
  }

  void push_log(const LogQuotient& a) {
    if (policy_ == BudgetPolicy::Throw) {
      throw BudgetExceeded("log-scale quotient cannot be tracked exactly");
    }
    if (!log_mode_) enter_log_mode();
    // need the two latest denominators
    const std::size_t n = seq_.size();
    if (n == 0) throw std::logic_error("log-scale quotient at a_0 is not supported");
    double log_p = 0.0;
    double log_q = 0.0;
    int res = -1;
    if (seq_.log_tail.empty()) {
      // last two entries are exact
      const Convergent& c1 = seq_.entries[n - 1];
      const double lp1 = log_of(c1.p);
      const double lq1 = log_of(c1.q);
      double rp = 0.0;
      double rq = 0.0;
      int q2res = 0;
      if (n == 1) {
        // a_0 = 0: p_1 = 1, q_1 = a_1
        seq_.log_tail.push_back({0.0, a.log_value, a.residue4});
        rq_ = std::exp(-a.log_value);
        rp_ = 0.0;
        q_prev_res_ = 1;
        return;
      }
      {
        const Convergent& c2 = seq_.entries[n - 2];
        rp = c2.p == 0 ? 0.0 : std::exp(log_of(c2.p) - lp1);
        rq = std::exp(log_of(c2.q) - lq1);
        q2res = residue4(c2.q);
      }
      log_p = lp1 + log_sum(a.log_value, rp);
      log_q = lq1 + log_sum(a.log_value, rq);
      if (a.residue4 >= 0) res = (a.residue4 * residue4(c1.q) + q2res) % 4;
      rq_ = std::exp(lq1 - log_q);
      rp_ = std::exp(lp1 - log_p);
      q_prev_res_ = residue4(c1.q);
    } else {
      const LogConvergent& c1 = seq_.log_tail.back();
      log_p = c1.log_p + log_sum(a.log_value, rp_);
      log_q = c1.log_q + log_sum(a.log_value, rq_);
      if (a.residue4 >= 0 && c1.q_residue4 >= 0 && q_prev_res_ >= 0) {
        res = (a.residue4 * c1.q_residue4 + q_prev_res_) % 4;
      }
      rq_ = std::exp(c1.log_q - log_q);
      rp_ = std::exp(c1.log_p - log_p);
      q_prev_res_ = c1.q_residue4;
    }
    seq_.log_tail.push_back({log_p, log_q, res});
  }

 private:
  void enter_log_mode() { log_mode_ = true; }

  void append_log(double log_p, double log_q, int res, double rp, double rq) {
    seq_.log_tail.push_back({log_p, log_q, res});
    rp_ = rp;
    rq_ = rq;
  }

  std::size_t budget_;
  BudgetPolicy policy_;
  ConvergentSeq seq_;
  bool log_mode_ = false;
  double rp_ = 0.0;  // p_{j-1} / p_j in log mode
  double rq_ = 0.0;  // q_{j-1} / q_j in log mode
  int q_prev_res_ = -1;
};

}  // namespace

std::size_t bit_length(const mpz_class& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

Rational::Rational(mpz_class num, mpz_class den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
  if (g > 1) {
    mpz_divexact(num_.get_mpz_t(), num_.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
  }
}

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  const std::string num_s(text.substr(0, slash));
  const std::string den_s = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));
  mpz_class num;
  mpz_class den;
  if (num_s.empty() || num.set_str(num_s, 10) != 0 || den.set_str(den_s, 10) != 0) {
    throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
  }
  return Rational(num, den);
}

double Rational::to_double() const { return mpq_class(num_, den_).get_d(); }

std::string Rational::to_string() const { return num_.get_str() + "/" + den_.get_str(); }

mpq_class Rational::to_mpq() const { return mpq_class(num_, den_); }

bool Rational::in_unit_interval() const { return num_ >= 0 && num_ < den_; }

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num() * b.den() - b.num() * a.den(), a.den() * b.den());
}

std::string_view to_string(CfConvention c) {
  return c == CfConvention::LastNotOne ? "last-not-one" : "last-is-one";
}

CfConvention parse_convention(std::string_view text) {
  if (text == "last-not-one") return CfConvention::LastNotOne;
  if (text == "last-is-one") return CfConvention::LastIsOne;
  throw std::invalid_argument("unknown convention: " + std::string(text));
}

std::string ContinuedFraction::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < quotients.size(); ++i) {
    if (i == 1) os << ';';
    else if (i > 1) os << ',';
    os << quotients[i].get_str();
  }
  for (const auto& l : log_tail) os << (quotients.size() == 1 ? ";" : ",") << "exp(" << l.log_value << ")";
  os << ']';
  return os.str();
}

double ConvergentSeq::log_q(std::size_t j) const {
  if (j < entries.size()) return log_of(entries[j].q);
  return log_tail.at(j - entries.size()).log_q;
}

int ConvergentSeq::q_residue4(std::size_t j) const {
  if (j < entries.size()) return residue4(entries[j].q);
  return log_tail.at(j - entries.size()).q_residue4;
}

ContinuedFraction cf_of_rational(const Rational& x, CfConvention convention) {
  if (!x.in_unit_interval()) throw std::domain_error("cf_of_rational expects 0 <= x < 1");
  ContinuedFraction cf;
  cf.convention = convention;
  mpz_class a = x.num();
  mpz_class b = x.den();
  mpz_class quot;
  mpz_class rem;
  while (b != 0) {
    mpz_fdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    cf.quotients.push_back(quot);
    a = b;
    b = rem;
  }
  if (convention == CfConvention::LastIsOne && cf.quotients.size() > 1 && cf.quotients.back() > 1) {
    cf.quotients.back() -= 1;
    cf.quotients.emplace_back(1);
  }
  return cf;
}

std::vector<mpz_class> cf_prefix(const Rational& x, std::size_t count) {
  std::vector<mpz_class> out;
  out.reserve(count);
  mpz_class a = x.num();
  mpz_class b = x.den();
  mpz_class quot;
  mpz_class rem;
  while (b != 0 && out.size() < count) {
    mpz_fdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    out.push_back(quot);
    a = b;
    b = rem;
  }
  return out;
}

Rational rational_of_cf(const ContinuedFraction& cf) {
  if (!cf.exact() || cf.quotients.empty()) throw std::domain_error("rational_of_cf needs an exact expansion");
  mpz_class num = cf.quotients.back();
  mpz_class den = 1;
  for (std::size_t i = cf.quotients.size() - 1; i-- > 0;) {
    // value = a_i + den/num
    mpz_class next_num = cf.quotients[i] * num + den;
    den = num;
    num = next_num;
  }
  return Rational(num, den);
}

ConvergentSeq convergents(const ContinuedFraction& cf, std::size_t J, std::size_t bit_budget,
                          BudgetPolicy policy) {
  if (J > cf.size()) throw std::out_of_range("requested more convergents than partial quotients");
  ConvergentBuilder builder(bit_budget, policy);
  for (std::size_t j = 0; j < J; ++j) {
    if (j < cf.quotients.size()) builder.push_exact(cf.quotients[j]);
    else builder.push_log(cf.log_tail[j - cf.quotients.size()]);
  }
  return builder.seq();
}

ConvergentSeq convergents(const ContinuedFraction& cf) { return convergents(cf, cf.size()); }

Rational FundamentalInterval::length() const { return hi - lo; }

FundamentalInterval fundamental_interval_of_prefix(const ContinuedFraction& prefix) {
  if (!prefix.exact() || prefix.quotients.empty() || prefix.quotients[0] != 0) {
    throw std::domain_error("fundamental interval needs an exact prefix starting with a_0 = 0");
  }
  const ConvergentSeq conv = convergents(prefix, prefix.size(), SIZE_MAX, BudgetPolicy::Throw);
  const std::size_t n = conv.entries.size();
  const Convergent& last = conv.entries[n - 1];
  const mpz_class p_prev = n >= 2 ? conv.entries[n - 2].p : mpz_class(1);
  const mpz_class q_prev = n >= 2 ? conv.entries[n - 2].q : mpz_class(0);
  Rational a(last.p, last.q);
  Rational b(last.p + p_prev, last.q + q_prev);
  FundamentalInterval I;
  I.prefix = prefix;
  if (a < b) {
    I.lo = a;
    I.hi = b;
  } else {
    I.lo = b;
    I.hi = a;
  }
  I.q = last.q;
  I.q_prev = q_prev;
  return I;
}

FundamentalInterval fundamental_interval(const Rational& p_over_q, CfConvention convention) {
  return fundamental_interval_of_prefix(cf_of_rational(p_over_q, convention));
}

Rational sample_uniform(const SampleInterval& I, std::uint64_t seed, std::uint64_t index,
                        unsigned grid_bits) {
  if (grid_bits < 64) throw std::invalid_argument("grid_bits must be at least 64");
  const unsigned words = (grid_bits + 63) / 64;
  mpz_class u;
  for (std::uint64_t attempt = 0;; ++attempt) {
    u = 0;
    for (unsigned w = 0; w < words; ++w) {
      const std::uint64_t bits = rng::keyed(seed, index, attempt * words + w);
      u <<= 64;
      u += mpz_class(static_cast<unsigned long>(bits));
    }
    const unsigned excess = words * 64 - grid_bits;
    if (excess > 0) u >>= excess;
    if (u != 0) break;
  }
  // lo + u (hi - lo) / 2^g
  const mpz_class len_num = I.hi.num() * I.lo.den() - I.lo.num() * I.hi.den();
  const mpz_class len_den = I.hi.den() * I.lo.den();
  mpz_class den = len_den;
  den <<= grid_bits;
  mpz_class num = I.lo.num() * (den / I.lo.den()) + u * len_num;
  return Rational(num, den);
}

Rational sample_uniform(const FundamentalInterval& I, std::uint64_t seed, std::uint64_t index,
                        unsigned grid_bits) {
  return sample_uniform(SampleInterval::of(I), seed, index, grid_bits);
}

GeneratedQuotient GeneratedQuotient::of(mpz_class v) {
  GeneratedQuotient g;
  g.approx = LogQuotient{log_of(v), residue4(v)};
  g.exact = std::move(v);
  return g;
}

ContinuedFraction synthetic_cf(const QuotientRule& rule, std::size_t J, std::size_t bit_budget) {
  ContinuedFraction cf;
  cf.quotients.emplace_back(0);
  ConvergentBuilder builder(bit_budget, BudgetPolicy::LogScale);
  builder.push_exact(0);
  for (std::size_t j = 1; j <= J; ++j) {
    GeneratorState state{j, &builder.seq(), bit_budget};
    auto next = rule(state);
    if (!next) break;
    if (next->exact && cf.log_tail.empty() && bit_length(*next->exact) <= bit_budget) {
      cf.quotients.push_back(*next->exact);
      builder.push_exact(*next->exact);
    } else {
      cf.log_tail.push_back(next->approx);
      builder.push_log(next->approx);
    }
  }
  return cf;
}

namespace rules {

QuotientRule constant(unsigned long a) {
  return [a](const GeneratorState&) { return GeneratedQuotient::of(mpz_class(a)); };
}

QuotientRule squares() {
  return [](const GeneratorState& s) {
    mpz_class j(static_cast<unsigned long>(s.j));
    return GeneratedQuotient::of(j * j);
  };
}

QuotientRule tower(unsigned long first) {
  return [first](const GeneratorState& s) -> std::optional<GeneratedQuotient> {
    if (s.j == 1) return GeneratedQuotient::of(mpz_class(first));
    const ConvergentSeq& conv = *s.so_far;
    const std::size_t last = conv.size() - 1;
    if (!conv.is_exact(last)) return std::nullopt;  // 10^{q_j} no longer representable
    const mpz_class& N = conv.entries[last].q;
    if (!N.fits_ulong_p()) return std::nullopt;
    const unsigned long n = N.get_ui();
    const double log_a = static_cast<double>(n) * std::log(10.0) - std::log(static_cast<double>(n));
    if (static_cast<double>(n) * std::log2(10.0) <= static_cast<double>(s.bit_budget)) {
      mpz_class pow10;
      mpz_ui_pow_ui(pow10.get_mpz_t(), 10, n);
      mpz_class a;
      mpz_cdiv_q(a.get_mpz_t(), pow10.get_mpz_t(), N.get_mpz_t());
      return GeneratedQuotient::of(a);
    }
    // 10^N = k N + r; ceil = k + (r > 0); k mod 4 from 10^N mod 4N.
    const mpz_class four_n = 4 * N;
    mpz_class m;
    const mpz_class ten(10);
    mpz_powm(m.get_mpz_t(), ten.get_mpz_t(), N.get_mpz_t(), four_n.get_mpz_t());
    const mpz_class r = m % N;
    const mpz_class k4 = (m - r) / N;
    int res = static_cast<int>((k4.get_si() + (r > 0 ? 1 : 0)) % 4);
    GeneratedQuotient g;
    g.approx = LogQuotient{log_a, res};
    return g;
  };
}

}  // namespace rules

}  // namespace weylab
