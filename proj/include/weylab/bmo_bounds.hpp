#pragma once

// Mean-oscillation bounds for gap Fourier series f(x) = sum b_n e(nu_n x)
// with |b_n| <= a_n: the S_N / T_N sequences, the kappa bound, the gap
// parameter delta, a Hilbert-inequality checker and empirical ||f||_I.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace weylab {

class MissingMajorant : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SeparationViolated : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ToleranceUnreachable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class TwistKind { None, RandomPhase, RandomSign };

struct SeriesSpec {
  std::string freq_text;
  std::string coeff_text;
  std::function<double(std::size_t)> nu;  // n >= 1, strictly increasing
  std::function<double(std::size_t)> a;   // n >= 1, positive
  std::optional<std::size_t> length;      // finite list when set
  /// For infinite specs: upper bounds of sum_{n>L} a_n^2 / M(n) and
  /// sum_{n>L} a_n^2, valid for L >= 2.
  std::function<double(std::size_t)> tail_T_majorant;
  std::function<double(std::size_t)> tail_sq_majorant;
  /// Limit of (nu_{n+1}/nu_n - 1) / max(a_n, a_{n+1}) as n grows, when known.
  std::optional<double> delta_limit;
  /// Largest n whose nu_n is an exact 64-bit integer.
  std::size_t exact_freq_limit = 0;
  /// Largest n whose nu_n is finite in double precision.
  std::size_t finite_limit = SIZE_MAX;
  TwistKind twist = TwistKind::None;
  std::uint64_t twist_seed = 0;

  /// nu_n = n^k, a_n = n^{-alpha}; needs 2 alpha > 1.
  static SeriesSpec power_law(unsigned k, double alpha);
  /// nu_n = base^n, a_n = n^{-alpha}; needs 2 alpha > 1.
  static SeriesSpec lacunary(unsigned base, double alpha);
  static SeriesSpec from_lists(std::vector<double> nu, std::vector<double> a);
  /// freq: "n", "n^K", "B^n"; coeff: "1", "1/n", "1/n^A", "n^-A".
  static SeriesSpec parse(const std::string& freq, const std::string& coeff);

  SeriesSpec with_twist(TwistKind kind, std::uint64_t seed) const;
  /// Unimodular multiplier of term n (1 when untwisted).
  std::complex<double> twist_factor(std::size_t n) const;
  bool finite() const { return length.has_value(); }
  std::uint64_t freq_int(std::size_t n) const;
};

/// M(n) = min(nu_n - nu_{n-1}, nu_{n+1} - nu_n); single neighbour gap at the
/// first index and at the last index of a finite list.
double neighbour_gap(const SeriesSpec& spec, std::size_t n);

struct BoundReport {
  std::vector<double> S;        // S_N, N = 1..N_max
  std::vector<double> T;        // T_N
  std::vector<double> tail_sq;  // sum_{n>N} a_n^2
  std::vector<double> epsilon_grid;
  std::vector<double> kappa_eps;     // inf_N of the bound for each epsilon
  std::vector<std::size_t> argmin_N;
  std::vector<bool> boundary_min;    // minimum sits at N_max
  std::vector<std::size_t> heuristic_N;  // S_N <= 1/eps < S_{N+1}
  std::vector<double> heuristic_value;
  double kappa = 0.0;  // grid maximum (an estimate of the sup)
  double kappa_epsilon = 0.0;
  bool bounded_on_grid = true;  // no boundary minima
};

struct StOptions {
  /// Explicit summation range for infinite specs before the majorant.
  std::size_t sum_to = 1'000'000;
};

/// S_N, T_N (with M(N+1) = nu_{N+2} - nu_{N+1}) and tail sums for N = 1..N_max.
BoundReport s_t_sequences(const SeriesSpec& spec, std::size_t N_max, const StOptions& opt = {});

/// 4 pi eps S_N + sqrt(6 T_N / eps + 4 sum_{n>N} a_n^2), N >= 1.
double kappa_term(const BoundReport& st, std::size_t N, double eps);

/// Geometric grid of `points` values from lo to hi.
std::vector<double> geometric_grid(double lo, double hi, std::size_t points);

struct KappaOptions {
  std::size_t grid_points = 64;
  double eps_lo = 1e-6;
  double eps_hi = 1.0 - 1e-6;
  std::size_t refine_points = 16;
  StOptions st;
};

/// Per-epsilon infimum over N <= N_max and its grid maximum.
BoundReport kappa_bound(const SeriesSpec& spec, std::size_t N_max, const KappaOptions& opt = {});
BoundReport kappa_bound(const SeriesSpec& spec, const std::vector<double>& epsilon_grid,
                        std::size_t N_max, const StOptions& opt = {});
/// Evaluates an existing S/T report on a given epsilon grid.
void fill_kappa(BoundReport& st, const std::vector<double>& epsilon_grid);

/// sum_{j>=0} (sum_{jN <= k < (j+1)N} a_k)^2 for a[0..K].
double fefferman_stat(const std::vector<double>& a, std::size_t N);

struct GapDelta {
  double delta = 0.0;
  std::size_t argmin_n = 0;
  bool from_limit = false;
  bool inconclusive = false;
};

/// inf over n >= n_min of (nu_{n+1}/nu_n - 1) / max(a_n, a_{n+1}), scanned
/// up to n_max and combined with the series' known limit.
GapDelta gap_delta(const SeriesSpec& spec, std::size_t n_min, std::size_t n_max = 1'000'000);

/// 3 (12 pi)^{1/3} / delta.
double norm_limit_bound(double delta);

struct HilbertResult {
  double lhs_modulus = 0.0;
  double rhs = 0.0;
  double real_part = 0.0;  // vanishes up to rounding
  bool holds = false;
};

HilbertResult hilbert_check(const std::vector<double>& lambdas, const std::vector<double>& deltas,
                            const std::vector<std::complex<double>>& weights);

struct NormConfig {
  double tolerance = 0.1;       // certified truncation error
  std::size_t min_points = 2000;
  double points_per_cycle = 8.0;
  double fft_epsilon = 1e-2;    // use the global FFT grid for |I| >= this
  unsigned fft_log2 = 23;
  std::size_t max_terms = 2'000'000;
};

struct NormResult {
  double norm = 0.0;
  std::complex<double> mean{0.0, 0.0};
  std::size_t terms = 0;
  double truncation_bound = 0.0;
  double quadrature_error = 0.0;
  std::size_t points = 0;
};

/// Smallest N with sqrt(6 T_N / eps + 4 sum_{n>N} a_n^2) <= tolerance.
std::size_t truncation_terms(const SeriesSpec& spec, double eps, double tolerance,
                             std::size_t max_terms);

/// Evaluates ||f||_I = |I|^{-1} int_I |f - f_I| for intervals [x0, x0 + eps]
/// of the truncated series. Keeps a global FFT grid for long intervals.
class NormEvaluator {
 public:
  NormEvaluator(SeriesSpec spec, NormConfig cfg = {});
  ~NormEvaluator();
  NormEvaluator(const NormEvaluator&) = delete;
  NormEvaluator& operator=(const NormEvaluator&) = delete;

  NormResult norm(double x0, double eps);

 private:
  NormResult norm_local(double x0, double eps, std::size_t N);
  NormResult norm_fft(double x0, double eps, std::size_t N);

  SeriesSpec spec_;
  NormConfig cfg_;
  std::vector<double> a_cache_;
  std::vector<double> tail_sq_;   // suffix sums for truncation checks
  std::vector<double> tail_T_;
  std::size_t fft_terms_ = 0;
  std::vector<std::complex<double>> grid_;
};

NormResult empirical_norm_I(const SeriesSpec& spec, double x0, double eps, const NormConfig& cfg = {});

}  // namespace weylab
