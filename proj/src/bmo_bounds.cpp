#include "weylab/bmo_bounds.hpp"

#include "weylab/rng.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <regex>

namespace weylab {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

std::uint64_t checked_pow(std::uint64_t b, std::size_t e) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / b) throw std::overflow_error("frequency overflows 64 bits");
    r *= b;
  }
  return r;
}

std::string trim_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

SeriesSpec SeriesSpec::power_law(unsigned k, double alpha) {
  if (k < 1) throw std::invalid_argument("power-law exponent k must be >= 1");
  if (!(2.0 * alpha > 1.0)) throw std::invalid_argument("coefficients must be square summable (2 alpha > 1)");
  SeriesSpec s;
  s.freq_text = k == 1 ? "n" : "n^" + std::to_string(k);
  s.coeff_text = alpha == 1.0 ? "1/n" : "n^-" + trim_num(alpha);
  s.nu = [k](std::size_t n) { return std::pow(static_cast<double>(n), static_cast<double>(k)); };
  s.a = [alpha](std::size_t n) { return std::pow(static_cast<double>(n), -alpha); };
  // M(n) >= k (n-1)^{k-1} and a_n <= (n-1)^{-alpha}; integral comparison
  const double s_exp = 2.0 * alpha + k - 2.0;
  if (s_exp > 0.0) {
    s.tail_T_majorant = [k, s_exp](std::size_t L) {
      return std::pow(static_cast<double>(L) - 1.0, -s_exp) / (k * s_exp);
    };
  }
  s.tail_sq_majorant = [alpha](std::size_t L) {
    return std::pow(static_cast<double>(L), 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
  };
  if (alpha == 1.0) s.delta_limit = static_cast<double>(k);
  else if (alpha < 1.0) s.delta_limit = HUGE_VAL;
  else s.delta_limit = 0.0;
  s.exact_freq_limit = static_cast<std::size_t>(std::floor(std::pow(0x1.0p63, 1.0 / k)));
  while (s.exact_freq_limit > 1) {
    try {
      checked_pow(s.exact_freq_limit, k);
      break;
    } catch (const std::overflow_error&) {
      --s.exact_freq_limit;
    }
  }
  return s;
}

SeriesSpec SeriesSpec::lacunary(unsigned base, double alpha) {
  if (base < 2) throw std::invalid_argument("lacunary base must be >= 2");
  if (!(2.0 * alpha > 1.0)) throw std::invalid_argument("coefficients must be square summable (2 alpha > 1)");
  SeriesSpec s;
  s.freq_text = std::to_string(base) + "^n";
  s.coeff_text = alpha == 1.0 ? "1/n" : "n^-" + trim_num(alpha);
  s.nu = [base](std::size_t n) { return std::pow(static_cast<double>(base), static_cast<double>(n)); };
  s.a = [alpha](std::size_t n) { return std::pow(static_cast<double>(n), -alpha); };
  const double b = base;
  // M(n) = b^{n-1}(b-1) for n >= 2 and a_n decreasing
  s.tail_T_majorant = [b, alpha](std::size_t L) {
    return std::pow(static_cast<double>(L + 1), -2.0 * alpha) * std::pow(b, 1.0 - static_cast<double>(L)) /
           ((b - 1.0) * (b - 1.0));
  };
  s.tail_sq_majorant = [alpha](std::size_t L) {
    return std::pow(static_cast<double>(L), 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
  };
  s.delta_limit = HUGE_VAL;
  s.exact_freq_limit = static_cast<std::size_t>(std::floor(63.0 / std::log2(b)));
  s.finite_limit = static_cast<std::size_t>(std::floor(1000.0 / std::log2(b)));
  return s;
}

SeriesSpec SeriesSpec::from_lists(std::vector<double> nu, std::vector<double> a) {
  if (nu.size() != a.size() || nu.empty()) throw std::invalid_argument("frequency and coefficient lists must match");
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (!(a[i] > 0.0)) throw std::invalid_argument("coefficients must be positive");
    if (i > 0 && !(nu[i] > nu[i - 1])) throw std::invalid_argument("frequencies must increase strictly");
    if (nu[i] < 1.0 || nu[i] != std::floor(nu[i])) throw std::invalid_argument("frequencies must be positive integers");
  }
  SeriesSpec s;
  s.freq_text = "list";
  s.coeff_text = "list";
  const std::size_t L = nu.size();
  s.length = L;
  auto nu_ptr = std::make_shared<std::vector<double>>(std::move(nu));
  auto a_ptr = std::make_shared<std::vector<double>>(std::move(a));
  s.nu = [nu_ptr](std::size_t n) { return nu_ptr->at(n - 1); };
  s.a = [a_ptr](std::size_t n) { return a_ptr->at(n - 1); };
  s.tail_T_majorant = [](std::size_t) { return 0.0; };
  s.tail_sq_majorant = [](std::size_t) { return 0.0; };
  s.exact_freq_limit = L;
  return s;
}

SeriesSpec SeriesSpec::parse(const std::string& freq, const std::string& coeff) {
  static const std::regex re_n(R"(\s*n\s*)");
  static const std::regex re_pow(R"(\s*n\s*\^\s*(\d+)\s*)");
  static const std::regex re_lac(R"(\s*(\d+)\s*\^\s*n\s*)");
  static const std::regex re_one(R"(\s*1\s*/\s*n\s*)");
  static const std::regex re_inv_pow(R"(\s*1\s*/\s*n\s*\^\s*([0-9.]+)\s*)");
  static const std::regex re_neg_pow(R"(\s*n\s*\^\s*-\s*([0-9.]+)\s*)");
  double alpha = 0.0;
  std::smatch m;
  if (std::regex_match(coeff, re_one)) alpha = 1.0;
  else if (std::regex_match(coeff, m, re_inv_pow) || std::regex_match(coeff, m, re_neg_pow)) alpha = std::stod(m[1]);
  else throw std::invalid_argument("unsupported coefficient rule '" + coeff + "'");
  if (std::regex_match(freq, re_n)) return power_law(1, alpha);
  if (std::regex_match(freq, m, re_pow)) return power_law(static_cast<unsigned>(std::stoul(m[1])), alpha);
  if (std::regex_match(freq, m, re_lac)) return lacunary(static_cast<unsigned>(std::stoul(m[1])), alpha);
  throw std::invalid_argument("unsupported frequency rule '" + freq + "'");
}

SeriesSpec SeriesSpec::with_twist(TwistKind kind, std::uint64_t seed) const {
  SeriesSpec s = *this;
  s.twist = kind;
  s.twist_seed = seed;
  return s;
}

cd SeriesSpec::twist_factor(std::size_t n) const {
  switch (twist) {
    case TwistKind::None: return {1.0, 0.0};
    case TwistKind::RandomSign: return {(rng::keyed(twist_seed, n, 0) >> 63) ? -1.0 : 1.0, 0.0};
    case TwistKind::RandomPhase: {
      const double t = 2.0 * kPi * rng::keyed_unit(twist_seed, n, 0);
      return {std::cos(t), std::sin(t)};
    }
  }
  return {1.0, 0.0};
}

std::uint64_t SeriesSpec::freq_int(std::size_t n) const {
  if (n > exact_freq_limit) throw std::overflow_error("frequency beyond exact 64-bit range");
  const double v = nu(n);
  if (v < 0x1.0p53) return static_cast<std::uint64_t>(v);
  // recompute exactly for large values
  static const std::regex re_pow(R"(n\^(\d+))");
  static const std::regex re_lac(R"((\d+)\^n)");
  std::smatch m;
  if (std::regex_match(freq_text, m, re_pow)) return checked_pow(n, std::stoul(m[1]));
  if (std::regex_match(freq_text, m, re_lac)) return checked_pow(std::stoul(m[1]), n);
  throw std::overflow_error("frequency not representable exactly");
}

double neighbour_gap(const SeriesSpec& spec, std::size_t n) {
  const bool has_prev = n >= 2;
  const bool has_next = !spec.length || n + 1 <= *spec.length;
  if (has_prev && has_next) return std::min(spec.nu(n) - spec.nu(n - 1), spec.nu(n + 1) - spec.nu(n));
  if (has_next) return spec.nu(n + 1) - spec.nu(n);
  if (has_prev) return spec.nu(n) - spec.nu(n - 1);
  return HUGE_VAL;
}

namespace {

// Suffix sums over n >= N+1 of a_n^2 / M(n) (without the special rule) and
// of a_n^2, for n up to L, plus the majorants beyond L.
struct Suffixes {
  std::size_t L = 0;
  std::vector<long double> T;   // T[n] = sum_{m>=n} a_m^2/M(m), index 1..L+1
  std::vector<long double> sq;  // sq[n] = sum_{m>=n} a_m^2
};

Suffixes build_suffixes(const SeriesSpec& spec, std::size_t L) {
  Suffixes s;
  s.L = L;
  s.T.assign(L + 2, 0.0L);
  s.sq.assign(L + 2, 0.0L);
  if (!spec.finite()) {
    if (!spec.tail_T_majorant || !spec.tail_sq_majorant) {
      throw MissingMajorant("infinite specification without tail majorants");
    }
    s.T[L + 1] = spec.tail_T_majorant(L);
    s.sq[L + 1] = spec.tail_sq_majorant(L);
  }
  for (std::size_t n = L; n >= 1; --n) {
    const double a = spec.a(n);
    s.T[n] = s.T[n + 1] + static_cast<long double>(a * a / neighbour_gap(spec, n));
    s.sq[n] = s.sq[n + 1] + static_cast<long double>(a * a);
  }
  return s;
}

// T_N with M(N+1) = nu_{N+2} - nu_{N+1}.
double special_T(const SeriesSpec& spec, const Suffixes& sfx, std::size_t N) {
  if (N + 1 > sfx.L) return static_cast<double>(sfx.T[sfx.L + 1]);
  const double a = spec.a(N + 1);
  const bool has_next = !spec.length || N + 2 <= *spec.length;
  const double gap = has_next ? spec.nu(N + 2) - spec.nu(N + 1) : neighbour_gap(spec, N + 1);
  return static_cast<double>(static_cast<long double>(a * a / gap) + sfx.T[N + 2]);
}

}  // namespace

BoundReport s_t_sequences(const SeriesSpec& spec, std::size_t N_max, const StOptions& opt) {
  if (N_max < 1) throw std::invalid_argument("N_max must be >= 1");
  if (spec.finite()) N_max = std::min(N_max, *spec.length);
  if (!spec.finite() && N_max + 2 > spec.finite_limit) {
    throw std::invalid_argument("N_max exceeds the range where frequencies are finite");
  }
  const std::size_t L =
      spec.finite() ? *spec.length : std::min(std::max(opt.sum_to, N_max + 2), spec.finite_limit);
  const Suffixes sfx = build_suffixes(spec, L);
  BoundReport r;
  long double S = 0.0L;
  for (std::size_t N = 1; N <= N_max; ++N) {
    S += static_cast<long double>(spec.a(N)) * static_cast<long double>(spec.nu(N));
    r.S.push_back(static_cast<double>(S));
    r.T.push_back(special_T(spec, sfx, N));
    r.tail_sq.push_back(static_cast<double>(sfx.sq[N + 1]));
  }
  return r;
}

double kappa_term(const BoundReport& st, std::size_t N, double eps) {
  const std::size_t i = N - 1;
  return 4.0 * kPi * eps * st.S[i] + std::sqrt(6.0 * st.T[i] / eps + 4.0 * st.tail_sq[i]);
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
  std::vector<double> g;
  if (points == 1) return {lo};
  const double r = std::log(hi / lo);
  for (std::size_t i = 0; i < points; ++i) {
    g.push_back(lo * std::exp(r * static_cast<double>(i) / static_cast<double>(points - 1)));
  }
  g.back() = hi;
  return g;
}

void fill_kappa(BoundReport& st, const std::vector<double>& epsilon_grid) {
  const std::size_t N_max = st.S.size();
  st.epsilon_grid = epsilon_grid;
  st.kappa_eps.clear();
  st.argmin_N.clear();
  st.boundary_min.clear();
  st.heuristic_N.clear();
  st.heuristic_value.clear();
  st.kappa = 0.0;
  st.bounded_on_grid = true;
  for (double eps : epsilon_grid) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
    double best = HUGE_VAL;
    std::size_t arg = 1;
    for (std::size_t N = 1; N <= N_max; ++N) {
      const double v = kappa_term(st, N, eps);
      if (v < best) {
        best = v;
        arg = N;
      }
    }
    st.kappa_eps.push_back(best);
    st.argmin_N.push_back(arg);
    const bool boundary = arg == N_max && N_max > 1;
    st.boundary_min.push_back(boundary);
    if (boundary) st.bounded_on_grid = false;
    std::size_t h = 1;
    while (h < N_max && st.S[h] <= 1.0 / eps) ++h;  // S_{h+1} > 1/eps
    st.heuristic_N.push_back(h);
    st.heuristic_value.push_back(kappa_term(st, h, eps));
    if (best > st.kappa) {
      st.kappa = best;
      st.kappa_epsilon = eps;
    }
  }
}

BoundReport kappa_bound(const SeriesSpec& spec, const std::vector<double>& epsilon_grid,
                        std::size_t N_max, const StOptions& opt) {
  BoundReport r = s_t_sequences(spec, N_max, opt);
  fill_kappa(r, epsilon_grid);
  return r;
}

BoundReport kappa_bound(const SeriesSpec& spec, std::size_t N_max, const KappaOptions& opt) {
  BoundReport r = s_t_sequences(spec, N_max, opt.st);
  std::vector<double> grid = geometric_grid(opt.eps_lo, opt.eps_hi, opt.grid_points);
  fill_kappa(r, grid);
  if (opt.refine_points > 0 && grid.size() >= 3) {
    const auto it = std::find(grid.begin(), grid.end(), r.kappa_epsilon);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double lo = grid[i == 0 ? 0 : i - 1];
    const double hi = grid[std::min(i + 1, grid.size() - 1)];
    for (double e : geometric_grid(lo, hi, opt.refine_points + 2)) {
      if (e > lo && e < hi && e != r.kappa_epsilon) grid.push_back(e);
    }
    std::sort(grid.begin(), grid.end());
    fill_kappa(r, grid);
  }
  return r;
}

double fefferman_stat(const std::vector<double>& a, std::size_t N) {
  if (N < 1) throw std::invalid_argument("block length N must be >= 1");
  long double total = 0.0L;
  for (std::size_t start = 0; start < a.size(); start += N) {
    long double block = 0.0L;
    for (std::size_t k = start; k < std::min(a.size(), start + N); ++k) {
      if (a[k] < 0.0) throw std::invalid_argument("coefficients must be nonnegative");
      block += a[k];
    }
    total += block * block;
  }
  return static_cast<double>(total);
}

GapDelta gap_delta(const SeriesSpec& spec, std::size_t n_min, std::size_t n_max) {
  if (n_min < 1) throw std::invalid_argument("n_min must be >= 1");
  if (spec.finite()) n_max = std::min(n_max, *spec.length - 1);
  GapDelta g;
  g.delta = HUGE_VAL;
  for (std::size_t n = n_min; n <= n_max; ++n) {
    const double nu0 = spec.nu(n);
    const double nu1 = spec.nu(n + 1);
    if (!std::isfinite(nu1)) break;
    const double v = ((nu1 - nu0) / nu0) / std::max(spec.a(n), spec.a(n + 1));
    if (v < g.delta) {
      g.delta = v;
      g.argmin_n = n;
    }
  }
  if (!spec.finite()) {
    if (spec.delta_limit) {
      if (*spec.delta_limit <= g.delta) {
        g.delta = *spec.delta_limit;
        g.from_limit = true;
      }
    } else if (g.argmin_n == n_max) {
      g.inconclusive = true;  // still decreasing at the cutoff
    }
  }
  if (!(g.delta > 0.0)) g.inconclusive = true;
  return g;
}

double norm_limit_bound(double delta) {
  return 3.0 * std::cbrt(12.0 * kPi) / delta;
}

HilbertResult hilbert_check(const std::vector<double>& lambdas, const std::vector<double>& deltas,
                            const std::vector<cd>& weights) {
  const std::size_t n = lambdas.size();
  if (deltas.size() != n || weights.size() != n) throw std::invalid_argument("hilbert_check inputs differ in length");
  for (std::size_t r = 0; r < n; ++r) {
    if (!(deltas[r] > 0.0)) throw SeparationViolated("separations must be positive");
    for (std::size_t s = 0; s < n; ++s) {
      if (s != r && std::abs(lambdas[r] - lambdas[s]) < deltas[r]) {
        throw SeparationViolated("|lambda_r - lambda_s| < delta_r for r = " + std::to_string(r));
      }
    }
  }
  cd total{0.0, 0.0};
  double scale = 0.0;
  double rhs = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    rhs += std::norm(weights[r]) / deltas[r];
    for (std::size_t s = 0; s < n; ++s) {
      if (s == r) continue;
      const double d = lambdas[r] - lambdas[s];
      total += weights[r] * std::conj(weights[s]) / d;
      scale += std::abs(weights[r]) * std::abs(weights[s]) / std::abs(d);
    }
  }
  HilbertResult h;
  h.rhs = 1.5 * kPi * rhs;
  h.real_part = total.real();
  h.lhs_modulus = std::abs(total);
  // pairs (r, s) and (s, r) cancel in the real part
  if (std::abs(total.real()) > 1e-9 * std::max(1.0, scale)) {
    throw std::logic_error("bilinear Hilbert sum is not purely imaginary");
  }
  h.holds = h.lhs_modulus <= h.rhs;
  return h;
}

std::size_t truncation_terms(const SeriesSpec& spec, double eps, double tolerance, std::size_t max_terms) {
  const std::size_t L = spec.finite() ? *spec.length : std::min(max_terms + 2, spec.finite_limit);
  const Suffixes sfx = build_suffixes(spec, L);
  const std::size_t top = spec.finite() ? *spec.length : L - 2;
  for (std::size_t N = 1; N <= top; ++N) {
    const double bound = std::sqrt(6.0 * special_T(spec, sfx, N) / eps + 4.0 * static_cast<double>(sfx.sq[N + 1]));
    if (bound <= tolerance) return N;
  }
  throw ToleranceUnreachable("truncation tolerance not reachable within max_terms");
}

NormEvaluator::NormEvaluator(SeriesSpec spec, NormConfig cfg) : spec_(std::move(spec)), cfg_(cfg) {
  const std::size_t L = spec_.finite() ? *spec_.length : std::min(cfg_.max_terms + 2, spec_.finite_limit);
  const Suffixes sfx = build_suffixes(spec_, L);
  tail_sq_.resize(L + 2);
  tail_T_.resize(L + 2);
  const std::size_t top = spec_.finite() ? *spec_.length : L - 2;
  for (std::size_t N = 1; N <= top; ++N) {
    tail_sq_[N] = static_cast<double>(sfx.sq[N + 1]);
    tail_T_[N] = special_T(spec_, sfx, N);
  }
  a_cache_.resize(top + 1);
  for (std::size_t n = 1; n <= top; ++n) a_cache_[n] = spec_.a(n);
}

NormEvaluator::~NormEvaluator() = default;

NormResult NormEvaluator::norm(double x0, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("interval length must lie in (0, 1]");
  const std::size_t top = a_cache_.size() - 1;
  std::size_t N = 0;
  double bound = 0.0;
  for (std::size_t n = 1; n <= top; ++n) {
    bound = std::sqrt(6.0 * tail_T_[n] / eps + 4.0 * tail_sq_[n]);
    if (bound <= cfg_.tolerance || n == top) {
      N = n;
      break;
    }
  }
  if (bound > cfg_.tolerance) throw ToleranceUnreachable("truncation tolerance not reachable within max_terms");
  if (N > spec_.exact_freq_limit) throw ToleranceUnreachable("required frequencies exceed exact 64-bit range");
  NormResult r = eps >= cfg_.fft_epsilon ? norm_fft(x0, eps, N) : norm_local(x0, eps, N);
  // the FFT grid may hold more terms than required
  r.truncation_bound = std::sqrt(6.0 * tail_T_[r.terms] / eps + 4.0 * tail_sq_[r.terms]);
  return r;
}

namespace {

// |I|^{-1} int |f - mean| by the midpoint rule on given samples, with the
// difference to the rule on every other sample as error estimate.
void finish_norm(const std::vector<double>& re, const std::vector<double>& im, NormResult& r) {
  const std::size_t K = re.size();
  double mr = 0.0, mi = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    mr += re[k];
    mi += im[k];
  }
  mr /= static_cast<double>(K);
  mi /= static_cast<double>(K);
  double acc = 0.0, acc_half = 0.0;
  std::size_t half = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const double v = std::hypot(re[k] - mr, im[k] - mi);
    acc += v;
    if (k % 2 == 0) {
      acc_half += v;
      ++half;
    }
  }
  r.mean = {mr, mi};
  r.norm = acc / static_cast<double>(K);
  r.quadrature_error = std::abs(r.norm - acc_half / static_cast<double>(half));
  r.points = K;
}

}  // namespace

NormResult NormEvaluator::norm_local(double x0, double eps, std::size_t N) {
  const double top_freq = static_cast<double>(spec_.freq_int(N));
  const auto K = static_cast<std::size_t>(
      std::max<double>(static_cast<double>(cfg_.min_points), std::ceil(cfg_.points_per_cycle * top_freq * eps)));
  std::vector<double> re(K, 0.0), im(K, 0.0);
  const long double h = static_cast<long double>(eps) / static_cast<long double>(K);
  const long double start = static_cast<long double>(x0) + 0.5L * h;
  for (std::size_t n = 1; n <= N; ++n) {
    const std::uint64_t nu = spec_.freq_int(n);
    // phases reduced mod 1 before scaling by 2 pi
    const long double p0 = std::fmod(static_cast<long double>(nu) * start, 1.0L);
    const long double dp = std::fmod(static_cast<long double>(nu) * h, 1.0L);
    const cd b = a_cache_[n] * spec_.twist_factor(n);
    const cd z0 = b * std::polar(1.0, static_cast<double>(2.0L * std::numbers::pi_v<long double> * p0));
    const cd rot = std::polar(1.0, static_cast<double>(2.0L * std::numbers::pi_v<long double> * dp));
    double zr = z0.real(), zi = z0.imag();
    const double rr = rot.real(), ri = rot.imag();
    for (std::size_t k = 0; k < K; ++k) {
      re[k] += zr;
      im[k] += zi;
      const double t = zr * rr - zi * ri;
      zi = zr * ri + zi * rr;
      zr = t;
    }
  }
  NormResult r;
  r.terms = N;
  finish_norm(re, im, r);
  return r;
}

NormResult NormEvaluator::norm_fft(double x0, double eps, std::size_t N) {
  const std::size_t G = std::size_t{1} << cfg_.fft_log2;
  if (fft_terms_ < N) {
    // values of the trigonometric polynomial at k/G are exact after folding
    // frequencies mod G
    grid_.assign(G, cd{0.0, 0.0});
    for (std::size_t n = 1; n <= N; ++n) {
      grid_[spec_.freq_int(n) % G] += a_cache_[n] * spec_.twist_factor(n);
    }
    auto* data = reinterpret_cast<fftw_complex*>(grid_.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(G), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    fft_terms_ = N;
  }
  // grid points inside [x0, x0 + eps), periodically wrapped
  const double x = x0 - std::floor(x0);
  const auto k0 = static_cast<std::size_t>(std::ceil(x * static_cast<double>(G)));
  const auto count = static_cast<std::size_t>(std::floor(eps * static_cast<double>(G)));
  if (count < cfg_.min_points) throw ToleranceUnreachable("interval too short for the FFT grid");
  std::vector<double> re(count), im(count);
  for (std::size_t k = 0; k < count; ++k) {
    const cd v = grid_[(k0 + k) % G];
    re[k] = v.real();
    im[k] = v.imag();
  }
  NormResult r;
  r.terms = fft_terms_;
  finish_norm(re, im, r);
  // partial cells at the ends
  double peak = 0.0;
  for (std::size_t k = 0; k < count; ++k) peak = std::max(peak, std::hypot(re[k], im[k]));
  r.quadrature_error += 4.0 * peak / static_cast<double>(count);
  return r;
}

NormResult empirical_norm_I(const SeriesSpec& spec, double x0, double eps, const NormConfig& cfg) {
  NormEvaluator ev(spec, cfg);
  return ev.norm(x0, eps);
}

}  // namespace weylab
