#pragma once

// Evaluation of F(x) = sum_{n>=1} e(n^2 x)/n: exact-phase partial sums,
// the block renormalization along continued-fraction convergents, the
// hybrid evaluator built from both, and the proxy series along convergents.

#include "weylab/cf_engine.hpp"
#include "weylab/gauss_sums.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace weylab {

using cplx = std::complex<double>;

inline constexpr std::uint64_t kDefaultNaiveCap = 100'000'000;
/// Empirical constant in the O(q_j^{-1/2}) / O(q_j^{1/2}) error terms.
inline constexpr double kDefaultErrorConstant = 5.0;

class CapExceeded : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class RegimeViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InsufficientConvergents : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class EvalMethod { Naive, Renormalized, Hybrid };
std::string_view to_string(EvalMethod m);

struct EvalResult {
  cplx value{0.0, 0.0};
  double error_bound = 0.0;
  std::uint64_t terms_used = 0;
  EvalMethod method = EvalMethod::Naive;
};

struct NaiveOptions {
  std::uint64_t cap = kDefaultNaiveCap;
  unsigned threads = 1;
};

/// sum_{n=1}^{N} e(n^2 x)/n. The summation order is fixed (aligned blocks
/// of 2^16 terms, then a pairwise tree over block sums), so the result does
/// not depend on `threads`.
EvalResult f_partial_naive(const Rational& x, std::uint64_t N, const NaiveOptions& opt = {});

/// f_partial_naive at each checkpoint in one pass; checkpoints ascending.
/// Each entry is bit-identical to a separate f_partial_naive call.
std::vector<cplx> f_partial_naive_checkpoints(const Rational& x,
                                              const std::vector<std::uint64_t>& checkpoints,
                                              const NaiveOptions& opt = {});

/// sum_{m <= n < N} e(n^2 x).
cplx weyl_sum_naive(const Rational& x, std::uint64_t m, std::uint64_t N,
                    const NaiveOptions& opt = {});

/// Continued-fraction data of a point, computed once and shared.
struct PointExpansion {
  Rational x;
  ContinuedFraction cf;
  ConvergentSeq conv;  // exact, j = 0 .. size-1
  /// Largest index whose convergent still approximates the irrationals
  /// near x (q_j^2 well below den(x)); equals the last index when x is
  /// treated as exact.
  std::size_t reliable_last = 0;

  static PointExpansion of(const Rational& x);
  std::size_t size() const { return conv.entries.size(); }
  const mpz_class& q(std::size_t j) const { return conv.entries[j].q; }
  const mpz_class& p(std::size_t j) const { return conv.entries[j].p; }
};

struct BlockContext {
  std::size_t j = 0;
  Rational convergent;  // p_j / q_j
  mpz_class q;
  mpz_class q_next;
  double h = 0.0;       // x - p_j/q_j
  double h_scaled = 0.0;  // |h| q_j q_{j+1}, in (1/2, 1]
  GaussSumValue theta;

  static BlockContext make(const PointExpansion& e, std::size_t j);
};

/// (theta_j / sqrt(q_j)) int_m^N e(h_j t^2) dt with error_bound C sqrt(q_j).
/// Requires N <= q_{j+1}/8.
EvalResult weyl_sum_renormalized(const BlockContext& ctx, std::uint64_t m, std::uint64_t N,
                                 double C = kDefaultErrorConstant);

/// int_a^b e(h t^2) dt to absolute accuracy ~1e-10.
cplx fresnel_segment(double h, double a, double b);

/// sum_{m <= n < q_{j+1}} e(n^2 x)/n approximated by
/// theta_j / (2 sqrt(q_j)) log+(q_{j+1} q_j / m^2); error_bound C q_j^{-1/2}.
EvalResult block_sum_renormalized(const BlockContext& ctx, const mpz_class& m,
                                  double C = kDefaultErrorConstant);

struct HybridOptions {
  std::uint64_t threshold = 1000;      // T
  std::optional<mpz_class> target;     // N; absent: all reliable blocks
  double C = kDefaultErrorConstant;
  NaiveOptions naive;
  /// Without a target: sum naively only below T and enter the block that
  /// contains T at m = T (error C sqrt(q_j)/T), so the cost never exceeds T.
  bool cut_at_threshold = false;
};

/// Naive summation below the first q_j >= T, then one renormalized term per
/// convergent block.
EvalResult f_eval_hybrid(const PointExpansion& e, const HybridOptions& opt);
EvalResult f_eval_hybrid(const Rational& x, const HybridOptions& opt);

/// error_bound f_eval_hybrid would report without a target, minus the
/// floating-point rounding of the naive part. Cheap: no summation.
double hybrid_error_bound(const PointExpansion& e, const HybridOptions& opt);

/// Smallest T-index j* used by the hybrid for this point, i.e. the first
/// j >= 1 with q_j >= T (or size() when none).
std::size_t first_block_at_or_above(const PointExpansion& e, const mpz_class& T);

struct ProxyTrace {
  std::vector<cplx> terms;         // j = 1..J; NaN components when the phase is unknown
  std::vector<double> magnitudes;  // |term_j|; log-scale aware
  std::vector<double> log_magnitudes;
  std::vector<cplx> partial_sums;  // running sums of terms
};

/// (1/2) sum_{j=1}^{J} theta_{p_j/q_j} q_j^{-1/2} log(q_{j+1}/q_j); needs
/// convergents 0..J+1.
ProxyTrace proxy_series(const ConvergentSeq& conv, std::size_t J);

enum class Verdict { ConvergesAbsolutely, Diverges, Inconclusive };
std::string_view to_string(Verdict v);

struct ConvergenceReport {
  ProxyTrace trace;
  std::vector<double> abs_bound_partial;  // partial sums of |theta_j| q_j^{-1/2} log(q_{j+1}/q_j)
  double tail_estimate = 0.0;
  double max_log_term = -HUGE_VAL;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

struct ConvergenceOptions {
  double divergence_threshold = 1e3;  // a term this large counts as unbounded growth
  double tail_tolerance = 1e-6;
};

ConvergenceReport convergence_report(const ContinuedFraction& cf, std::size_t J_max,
                                     const ConvergenceOptions& opt = {});

struct DivergenceFit {
  double slope = 0.0;
  double intercept = 0.0;
  double predicted = 0.0;  // |theta_{p/q}| / sqrt(q)
  std::vector<std::uint64_t> N;
  std::vector<double> abs_F;
};

/// Least-squares slope of |F_N(p/q)| against log N.
DivergenceFit rational_divergence_slope(const mpz_class& p, const mpz_class& q,
                                        const std::vector<std::uint64_t>& N_grid,
                                        const NaiveOptions& opt = {});

}  // namespace weylab
