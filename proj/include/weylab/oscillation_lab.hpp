#pragma once

// Monte Carlo experiments on the oscillation of F inside fundamental
// intervals: interval means, level-set survival curves and their decay
// rates, and partial-quotient statistics of uniformly drawn points.

#include "weylab/cf_engine.hpp"
#include "weylab/theta_series.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace weylab {

class InsufficientData : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Replaces F when set; used to check the estimators on known integrands.
using Integrand = std::function<cplx(const Rational&)>;

struct EvalConfig {
  /// Per-sample target for the hybrid error_bound. The threshold T is the
  /// smallest min_threshold * 2^k meeting it (capped at max_threshold).
  double error_target = 0.15;
  std::uint64_t min_threshold = 1000;
  std::uint64_t max_threshold = 1u << 22;
  double C = kDefaultErrorConstant;
  unsigned threads = 1;
};

/// F(x) through the cut-at-threshold hybrid with an adaptively chosen T.
EvalResult f_eval_adaptive(const Rational& x, const EvalConfig& cfg);

struct OscillationSample {
  Rational x;
  cplx f_value;
  double f_error = 0.0;
  double osc = 0.0;  // |f_value - mean|
};

struct MeanEstimate {
  cplx mean{0.0, 0.0};
  double std_error = 0.0;
  std::size_t samples = 0;
};

struct SampleSet {
  SampleInterval interval;
  std::vector<OscillationSample> samples;
  MeanEstimate mean;
  double max_f_error = 0.0;
};

/// Draws indices 0..M-1 of (seed) in I, evaluates F (or the hook) at each
/// and fills osc against the sample mean. Independent of cfg.threads.
SampleSet sample_oscillation(const SampleInterval& I, std::size_t M, std::uint64_t seed,
                             const EvalConfig& cfg, const Integrand& hook = {});

/// Monte Carlo mean of F over I with its standard error.
MeanEstimate estimate_F_I(const SampleInterval& I, std::size_t M, std::uint64_t seed,
                          const EvalConfig& cfg, const Integrand& hook = {});

struct ProxyValue {
  cplx value{0.0, 0.0};
  double error_bound = 0.0;
  std::size_t terms = 0;
};

/// (1/2) sum_{q_j >= q} theta_j q_j^{-1/2} log(q_{j+1}/q_j) over the reliable
/// convergents of x, the predicted value of F(x) - F_I on I with denominator q.
ProxyValue oscillation_proxy(const Rational& x, const mpz_class& q,
                             double C = kDefaultErrorConstant);

struct SlopeFit {
  double slope = 0.0;  // survival ~ exp(-slope * lambda)
  double intercept = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t points_used = 0;
};

struct LevelSetEstimate {
  std::vector<double> lambda_grid;
  std::vector<double> survival;
  std::vector<std::uint64_t> counts;
  std::vector<double> ci_halfwidth;  // Wilson, 95%
  std::size_t samples = 0;
  mpz_class q;
  cplx mean{0.0, 0.0};
  double mean_std_error = 0.0;
  double max_f_error = 0.0;
  std::optional<SlopeFit> fit;
};

/// Survival fractions |{osc > lambda}| / M from an existing sample set.
LevelSetEstimate level_set_from_samples(const SampleSet& set, const std::vector<double>& lambda_grid);

LevelSetEstimate level_set_curve(const SampleInterval& I, const std::vector<double>& lambda_grid,
                                 std::size_t M, std::uint64_t seed, const EvalConfig& cfg);

/// Wilson score half-width for k successes out of n at z = 1.96.
double wilson_halfwidth(std::uint64_t k, std::uint64_t n, double z = 1.96);

/// Weighted least squares of log survival against lambda over grid points
/// with at least min_count exceedances (and survival < 1).
SlopeFit decay_slope_fit(const LevelSetEstimate& est, std::uint64_t min_count = 50);

/// Least-squares fit on explicit (lambda, survival, weight) data.
SlopeFit weighted_log_fit(const std::vector<double>& lambda, const std::vector<double>& survival,
                          const std::vector<double>& weight);

struct MetricStats {
  std::size_t j = 0;
  std::size_t samples = 0;
  std::vector<std::uint64_t> counts;  // counts[k-1]: a_j(x) = k, k = 1..k_max
  std::vector<double> frequency;
  std::vector<double> reference;      // c / k^2 with c = frequency at k = 1
  double band = 3.0;
  std::uint64_t overflow = 0;         // a_j(x) > k_max
};

/// Empirical law of the partial quotient a_j(x) for x uniform in I.
MetricStats partial_quotient_histogram(const FundamentalInterval& I, std::size_t j, std::size_t M,
                                       std::uint64_t seed, std::size_t k_max = 20);

/// A_n bound for n = 1..n_max; nullopt means unconstrained.
using QuotientBound = std::function<std::optional<double>(std::size_t)>;

struct RestrictedMeasure {
  double deficit = 0.0;  // log|I| - log|restricted set|
  double S = 0.0;        // sum of 1/A_n over constrained n
  double ratio = 0.0;    // deficit / S (NaN when S = 0)
  std::uint64_t hits = 0;
  std::size_t samples = 0;
};

/// Measure of {x in I : a_{j0+n}(x) <= A_n for n <= n_max} by Monte Carlo.
RestrictedMeasure restricted_measure(const FundamentalInterval& I, const QuotientBound& A,
                                     std::size_t n_max, std::size_t M, std::uint64_t seed);

/// Evenly spaced grid of `steps` points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t steps);

}  // namespace weylab
