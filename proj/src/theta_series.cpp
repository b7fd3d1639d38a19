#include "weylab/theta_series.hpp"

#include "weylab/phase_walker.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <span>
#include <thread>

namespace weylab {

namespace {

constexpr std::uint64_t kBlock = std::uint64_t{1} << 16;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Weight { Unit, Harmonic };

double log_of(const mpz_class& v) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::numbers::ln2;
}

std::uint64_t to_u64(const mpz_class& v, const char* what) {
  if (v < 0 || !v.fits_ulong_p()) throw CapExceeded(std::string(what) + " does not fit in 64 bits");
  return v.get_ui();
}

// Sequential accumulation over [walker.n(), end); the walker is left at `end`.
void accumulate(QuadraticPhaseWalker& w, std::uint64_t end, Weight weight, double& re, double& im) {
  if (weight == Weight::Harmonic) {
    for (std::uint64_t n = w.n(); n < end; ++n) {
      const double angle = kTwoPi * w.phase();
      const double inv = 1.0 / static_cast<double>(n);
      re += std::cos(angle) * inv;
      im += std::sin(angle) * inv;
      w.advance();
    }
  } else {
    for (std::uint64_t n = w.n(); n < end; ++n) {
      const double angle = kTwoPi * w.phase();
      re += std::cos(angle);
      im += std::sin(angle);
      w.advance();
    }
  }
}

cplx run(QuadraticPhaseWalker& w, std::uint64_t end, Weight weight) {
  double re = 0.0;
  double im = 0.0;
  accumulate(w, end, weight, re, im);
  return {re, im};
}

cplx pairwise(std::span<const cplx> v) {
  if (v.empty()) return {0.0, 0.0};
  if (v.size() == 1) return v[0];
  const std::size_t mid = v.size() / 2;
  return pairwise(v.first(mid)) + pairwise(v.subspan(mid));
}

// Sums of the complete aligned blocks in [begin, end) plus the trailing
// partial block, computed by up to `threads` workers.
struct BlockedSum {
  std::vector<cplx> full;
  cplx tail{0.0, 0.0};
  cplx total() const { return pairwise(full) + tail; }
};

BlockedSum blocked_sum(const Rational& x, std::uint64_t begin, std::uint64_t end, Weight weight,
                       unsigned threads) {
  BlockedSum out;
  if (end <= begin) return out;
  // block boundaries at multiples of kBlock; first block starts at `begin`
  std::vector<std::pair<std::uint64_t, std::uint64_t>> blocks;
  std::uint64_t lo = begin;
  while (true) {
    const std::uint64_t hi = (lo / kBlock + 1) * kBlock;
    if (hi > end) break;
    blocks.emplace_back(lo, hi);
    lo = hi;
  }
  const std::uint64_t tail_begin = lo;
  out.full.assign(blocks.size(), cplx{0.0, 0.0});
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks.size())));
  auto work = [&](std::size_t first, std::size_t last) {
    if (first >= last) return;
    QuadraticPhaseWalker w(x, blocks[first].first);
    for (std::size_t b = first; b < last; ++b) out.full[b] = run(w, blocks[b].second, weight);
  };
  if (workers <= 1) {
    work(0, blocks.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t per = (blocks.size() + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
      const std::size_t first = t * per;
      const std::size_t last = std::min(blocks.size(), first + per);
      pool.emplace_back(work, first, last);
    }
    for (auto& th : pool) th.join();
  }
  if (tail_begin < end) {
    QuadraticPhaseWalker w(x, tail_begin);
    out.tail = run(w, end, weight);
  }
  return out;
}

double rounding_bound(std::uint64_t terms, double weight_sum) {
  return static_cast<double>(terms) * 0x1.0p-50 * std::max(1.0, weight_sum);
}

}  // namespace

std::string_view to_string(EvalMethod m) {
  switch (m) {
    case EvalMethod::Naive: return "naive";
    case EvalMethod::Renormalized: return "renormalized";
    case EvalMethod::Hybrid: return "hybrid";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ConvergesAbsolutely: return "converges-absolutely";
    case Verdict::Diverges: return "diverges";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

EvalResult f_partial_naive(const Rational& x, std::uint64_t N, const NaiveOptions& opt) {
  if (N > opt.cap) throw CapExceeded("naive summation length " + std::to_string(N) + " exceeds cap");
  EvalResult r;
  r.method = EvalMethod::Naive;
  r.terms_used = N;
  if (N == 0) return r;
  r.value = blocked_sum(x, 1, N + 1, Weight::Harmonic, opt.threads).total();
  r.error_bound = rounding_bound(N, std::log(static_cast<double>(N)) + 1.0);
  return r;
}

std::vector<cplx> f_partial_naive_checkpoints(const Rational& x,
                                              const std::vector<std::uint64_t>& checkpoints,
                                              const NaiveOptions& opt) {
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw std::invalid_argument("checkpoints must be ascending");
  }
  std::vector<cplx> out;
  out.reserve(checkpoints.size());
  if (checkpoints.empty()) return out;
  if (checkpoints.back() > opt.cap) throw CapExceeded("naive summation length exceeds cap");
  std::vector<cplx> full;
  QuadraticPhaseWalker w(x, 1);
  double re = 0.0;
  double im = 0.0;
  std::uint64_t block_end = kBlock;
  for (std::uint64_t c : checkpoints) {
    const std::uint64_t end = c + 1;
    while (block_end <= end) {
      accumulate(w, block_end, Weight::Harmonic, re, im);
      full.emplace_back(re, im);
      re = im = 0.0;
      block_end += kBlock;
    }
    accumulate(w, end, Weight::Harmonic, re, im);
    out.push_back(c == 0 ? cplx{0.0, 0.0} : pairwise(full) + cplx{re, im});
  }
  return out;
}

cplx weyl_sum_naive(const Rational& x, std::uint64_t m, std::uint64_t N, const NaiveOptions& opt) {
  if (m > N) throw std::invalid_argument("weyl_sum_naive needs m <= N");
  if (N - m > opt.cap) throw CapExceeded("naive summation length exceeds cap");
  return blocked_sum(x, m, N, Weight::Unit, opt.threads).total();
}

PointExpansion PointExpansion::of(const Rational& x) {
  PointExpansion e;
  e.x = x;
  e.cf = cf_of_rational(x);
  e.conv = convergents(e.cf, e.cf.size(), SIZE_MAX, BudgetPolicy::Throw);
  const std::size_t den_bits = bit_length(x.den());
  e.reliable_last = 0;
  for (std::size_t j = 0; j < e.conv.entries.size(); ++j) {
    if (2 * bit_length(e.conv.entries[j].q) + 32 <= den_bits) e.reliable_last = j;
  }
  return e;
}

BlockContext BlockContext::make(const PointExpansion& e, std::size_t j) {
  if (j + 1 >= e.size()) throw InsufficientConvergents("block context needs q_{j+1}");
  BlockContext ctx;
  ctx.j = j;
  ctx.q = e.q(j);
  ctx.q_next = e.q(j + 1);
  ctx.convergent = Rational(e.p(j), e.q(j));
  const mpq_class diff = e.x.to_mpq() - ctx.convergent.to_mpq();
  ctx.h = diff.get_d();
  mpq_class scaled = abs(diff) * mpq_class(ctx.q * ctx.q_next);
  ctx.h_scaled = scaled.get_d();
  if (!(scaled > mpq_class(1, 2) && scaled <= 1)) {
    throw std::logic_error("convergent approximation bound 1/2 < |h| q_j q_{j+1} <= 1 violated");
  }
  ctx.theta = gauss_sum_fast(e.p(j), ctx.q);
  return ctx;
}

namespace {

// int_u^inf e^{i c t^2} dt by the asymptotic expansion in 1/(c u^2).
cplx fresnel_tail(double c, double u) {
  const double X = u * u;
  const cplx ic{0.0, c};
  // f(s) = s^{-1/2}/2; I = -e^{icX} sum_k (-1)^k f^(k)(X) / (ic)^{k+1}
  cplx sum{0.0, 0.0};
  double fk = 0.5 / u;  // f(X)
  cplx ic_pow = ic;
  double prev_mag = HUGE_VAL;
  for (int k = 0; k < 60; ++k) {
    const cplx term = (k % 2 == 0 ? 1.0 : -1.0) * fk / ic_pow;
    const double mag = std::abs(term);
    if (mag > prev_mag) break;  // asymptotic series started to diverge
    sum += term;
    if (mag < 1e-18 * std::abs(sum)) break;
    prev_mag = mag;
    fk *= (-0.5 - k) / X;
    ic_pow *= ic;
  }
  return -std::exp(cplx{0.0, c * X}) * sum;
}

cplx fresnel_panels(double c, double a, double b) {
  using GL = boost::math::quadrature::gauss<double, 10>;
  const auto& abscissa = GL::abscissa();
  const auto& weights = GL::weights();
  const double span = std::abs(c) * (b * b - a * a);
  const auto panels = static_cast<std::size_t>(std::ceil(span / (std::numbers::pi / 4.0))) + 1;
  const double ds = (b * b - a * a) / static_cast<double>(panels);
  cplx total{0.0, 0.0};
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = std::sqrt(a * a + ds * static_cast<double>(k));
    const double hi = k + 1 == panels ? b : std::sqrt(a * a + ds * static_cast<double>(k + 1));
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    cplx acc{0.0, 0.0};
    auto eval = [&](double t) { return std::exp(cplx{0.0, c * t * t}); };
    // boost stores non-negative abscissas; the zero node (odd order) once
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      const double xi = abscissa[i] * half;
      if (abscissa[i] == 0.0) acc += weights[i] * eval(mid);
      else acc += weights[i] * (eval(mid + xi) + eval(mid - xi));
    }
    total += acc * half;
  }
  return total;
}

}  // namespace

cplx fresnel_segment(double h, double a, double b) {
  if (b < a) return -fresnel_segment(h, b, a);
  if (h == 0.0) return {b - a, 0.0};
  const double c = kTwoPi * h;
  constexpr double kAsymptoticPhase = 200.0;
  const double u_star = std::sqrt(kAsymptoticPhase / std::abs(c));
  if (b <= u_star) return fresnel_panels(c, a, b);
  if (a >= u_star) return fresnel_tail(c, a) - fresnel_tail(c, b);
  return fresnel_panels(c, a, u_star) + fresnel_tail(c, u_star) - fresnel_tail(c, b);
}

EvalResult weyl_sum_renormalized(const BlockContext& ctx, std::uint64_t m, std::uint64_t N, double C) {
  if (m > N) throw std::invalid_argument("weyl_sum_renormalized needs m <= N");
  if (mpz_class(static_cast<unsigned long>(N)) * 8 > ctx.q_next) {
    throw RegimeViolation("block regime requires N <= q_{j+1}/8");
  }
  EvalResult r;
  r.method = EvalMethod::Renormalized;
  r.terms_used = 1;
  if (m == N) return r;
  const double sqrt_q = std::exp(0.5 * log_of(ctx.q));
  r.value = ctx.theta.value() / sqrt_q *
            fresnel_segment(ctx.h, static_cast<double>(m), static_cast<double>(N));
  r.error_bound = C * sqrt_q;
  return r;
}

EvalResult block_sum_renormalized(const BlockContext& ctx, const mpz_class& m, double C) {
  if (m < ctx.q || m >= ctx.q_next) throw std::out_of_range("block sum needs q_j <= m < q_{j+1}");
  const double log_q = log_of(ctx.q);
  const double log_arg = log_of(ctx.q_next) + log_q - 2.0 * log_of(m);
  const double log_plus = std::max(0.0, log_arg);
  const double inv_sqrt_q = std::exp(-0.5 * log_q);
  EvalResult r;
  r.method = EvalMethod::Renormalized;
  r.terms_used = 1;
  r.value = ctx.theta.value() * (0.5 * inv_sqrt_q * log_plus);
  r.error_bound = C * inv_sqrt_q;
  return r;
}

namespace {

struct UntargetedPlan {
  std::uint64_t naive_end = 0;  // naive part covers 1..naive_end
  std::optional<std::size_t> partial_block;
  mpz_class partial_from;
  std::size_t full_first = 0;
  std::size_t full_last = 0;  // exclusive
  double bound = 0.0;
};

UntargetedPlan plan_untargeted(const PointExpansion& e, const HybridOptions& opt) {
  if (opt.threshold < 1) throw std::invalid_argument("hybrid threshold must be >= 1");
  const mpz_class T(static_cast<unsigned long>(opt.threshold));
  const std::size_t R = e.reliable_last;
  UntargetedPlan plan;
  if (opt.cut_at_threshold) {
    // block j with q_j <= T < q_{j+1}
    std::size_t j = 0;
    while (j + 1 < e.size() && e.q(j + 1) <= T) ++j;
    if (j + 1 > R) throw InsufficientConvergents("no reliable convergent block above the threshold");
    plan.naive_end = opt.threshold - 1;
    if (e.q(j) == T) {
      plan.full_first = j;
    } else {
      plan.partial_block = j;
      plan.partial_from = T;
      plan.full_first = j + 1;
      plan.bound += opt.C * std::exp(0.5 * log_of(e.q(j))) / static_cast<double>(opt.threshold);
    }
  } else {
    const std::size_t jstar = first_block_at_or_above(e, T);
    if (jstar >= R) throw InsufficientConvergents("no reliable convergent block above the threshold");
    plan.naive_end = to_u64(e.q(jstar), "q_j*") - 1;
    plan.full_first = jstar;
  }
  plan.full_last = R;
  for (std::size_t j = plan.full_first; j < R; ++j) {
    plan.bound += opt.C * std::exp(-0.5 * log_of(e.q(j)));
  }
  // blocks past the reliable range: geometric growth bounds their sum
  const double inv_sqrt_qR = std::exp(-0.5 * log_of(e.q(R)));
  plan.bound += (opt.C + 0.5 * std::log(static_cast<double>(bit_length(e.x.den())))) * 4.5 * inv_sqrt_qR;
  return plan;
}

}  // namespace

double hybrid_error_bound(const PointExpansion& e, const HybridOptions& opt) {
  return plan_untargeted(e, opt).bound;
}

std::size_t first_block_at_or_above(const PointExpansion& e, const mpz_class& T) {
  for (std::size_t j = 1; j < e.size(); ++j) {
    if (e.q(j) >= T) return j;
  }
  return e.size();
}

EvalResult f_eval_hybrid(const PointExpansion& e, const HybridOptions& opt) {
  if (opt.threshold < 1) throw std::invalid_argument("hybrid threshold must be >= 1");
  const mpz_class T(static_cast<unsigned long>(opt.threshold));
  const std::size_t jstar = first_block_at_or_above(e, T);
  EvalResult r;
  r.method = EvalMethod::Hybrid;

  if (opt.target) {
    const mpz_class& N = *opt.target;
    if (jstar >= e.size() || e.q(jstar) > N) {
      return f_partial_naive(e.x, to_u64(N, "target"), opt.naive);
    }
    // J: last convergent with q_J <= N
    std::size_t J = jstar;
    while (J + 1 < e.size() && e.q(J + 1) <= N) ++J;
    if (J + 1 >= e.size()) throw InsufficientConvergents("target reaches the last convergent of x");
    const std::uint64_t naive_end = to_u64(e.q(jstar), "q_j*") - 1;
    r = f_partial_naive(e.x, naive_end, opt.naive);
    r.method = EvalMethod::Hybrid;
    double bound = r.error_bound;
    for (std::size_t j = jstar; j < J; ++j) {
      const BlockContext ctx = BlockContext::make(e, j);
      const EvalResult b = block_sum_renormalized(ctx, ctx.q, opt.C);
      r.value += b.value;
      bound += b.error_bound;
      ++r.terms_used;
    }
    // remaining q_J <= n <= N
    const mpz_class rest = N + 1 - e.q(J);
    if (rest <= T) {
      const std::uint64_t lo = to_u64(e.q(J), "q_J");
      const std::uint64_t hi = to_u64(N, "target") + 1;
      QuadraticPhaseWalker w(e.x, lo);
      r.value += run(w, hi, Weight::Harmonic);
      r.terms_used += hi - lo;
    } else {
      const BlockContext ctx = BlockContext::make(e, J);
      r.value += block_sum_renormalized(ctx, ctx.q, opt.C).value;
      bound += ctx.q == N + 1 ? 0.0 : block_sum_renormalized(ctx, ctx.q, opt.C).error_bound;
      if (N + 1 < ctx.q_next) {
        const EvalResult cut = block_sum_renormalized(ctx, N + 1, opt.C);
        r.value -= cut.value;
        bound += cut.error_bound;
      }
      r.terms_used += 2;
    }
    r.error_bound = bound;
    return r;
  }

  const UntargetedPlan plan = plan_untargeted(e, opt);
  r = f_partial_naive(e.x, plan.naive_end, opt.naive);
  r.method = EvalMethod::Hybrid;
  if (plan.partial_block) {
    const BlockContext ctx = BlockContext::make(e, *plan.partial_block);
    r.value += block_sum_renormalized(ctx, plan.partial_from, opt.C).value;
    ++r.terms_used;
  }
  for (std::size_t j = plan.full_first; j < plan.full_last; ++j) {
    const BlockContext ctx = BlockContext::make(e, j);
    r.value += block_sum_renormalized(ctx, ctx.q, opt.C).value;
    ++r.terms_used;
  }
  r.error_bound += plan.bound;
  return r;
}

EvalResult f_eval_hybrid(const Rational& x, const HybridOptions& opt) {
  return f_eval_hybrid(PointExpansion::of(x), opt);
}

ProxyTrace proxy_series(const ConvergentSeq& conv, std::size_t J) {
  if (conv.size() < J + 2) throw InsufficientConvergents("proxy series needs convergents 0..J+1");
  ProxyTrace t;
  cplx running{0.0, 0.0};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t j = 1; j <= J; ++j) {
    double log_ratio = 0.0;
    if (conv.is_exact(j + 1)) {
      const mpq_class ratio(conv.entries[j + 1].q, conv.entries[j].q);
      log_ratio = std::log(ratio.get_d());
    } else {
      log_ratio = conv.log_q(j + 1) - conv.log_q(j);
    }
    const double log_q = conv.log_q(j);
    cplx term{nan, nan};
    double abs_theta = nan;
    if (conv.is_exact(j)) {
      const GaussSumValue th = gauss_sum_fast(conv.entries[j].p, conv.entries[j].q);
      abs_theta = std::sqrt(static_cast<double>(th.claimed_mod_sq));
      term = th.value() * (0.5 * std::exp(-0.5 * log_q) * log_ratio);
    } else {
      const int res = conv.q_residue4(j);
      if (res == 2) {
        abs_theta = 0.0;
        term = {0.0, 0.0};
      } else if (res == 0) {
        abs_theta = std::numbers::sqrt2;
      } else if (res == 1 || res == 3) {
        abs_theta = 1.0;
      }
    }
    double log_mag = -HUGE_VAL;
    if (std::isnan(abs_theta)) log_mag = nan;
    else if (abs_theta > 0.0 && log_ratio > 0.0) log_mag = std::log(0.5 * abs_theta) - 0.5 * log_q + std::log(log_ratio);
    t.terms.push_back(term);
    t.log_magnitudes.push_back(log_mag);
    t.magnitudes.push_back(std::isnan(log_mag) ? nan : std::exp(log_mag));
    running += term;
    t.partial_sums.push_back(running);
  }
  return t;
}

ConvergenceReport convergence_report(const ContinuedFraction& cf, std::size_t J_max,
                                     const ConvergenceOptions& opt) {
  ConvergenceReport rep;
  const std::size_t count = std::min(cf.size(), J_max + 2);
  const ConvergentSeq conv = convergents(cf, count);
  if (conv.size() < 3) {
    rep.reason = "fewer than three convergents";
    return rep;
  }
  const std::size_t J = conv.size() - 2;
  rep.trace = proxy_series(conv, J);
  double acc = 0.0;
  bool unknown = false;
  std::size_t last_nonzero = 0;
  bool any_nonzero = false;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < J; ++i) {
    const double lm = rep.trace.log_magnitudes[i];
    if (std::isnan(lm)) {
      unknown = true;
    } else if (lm > -HUGE_VAL) {
      acc += rep.trace.magnitudes[i];
      any_nonzero = true;
      last_nonzero = i;
      if (lm > rep.max_log_term) {
        rep.max_log_term = lm;
        argmax = i;
      }
    }
    rep.abs_bound_partial.push_back(unknown ? std::numeric_limits<double>::quiet_NaN() : acc);
  }
  if (any_nonzero && rep.max_log_term >= std::log(opt.divergence_threshold) && argmax == last_nonzero) {
    rep.verdict = Verdict::Diverges;
    rep.reason = "proxy terms grow past the divergence threshold up to the last available term";
    return rep;
  }
  if (unknown) {
    rep.reason = "some terms have unknown magnitude";
    return rep;
  }
  if (!any_nonzero) {
    rep.verdict = Verdict::ConvergesAbsolutely;
    rep.reason = "all available terms vanish";
    return rep;
  }
  // future blocks: q_{J+k} >= Fib_k q_{J+1}; log-ratios estimated by the recent maximum
  double recent_log_ratio = 0.0;
  for (std::size_t j = (J > 5 ? J - 4 : 1); j <= J; ++j) {
    recent_log_ratio = std::max(recent_log_ratio, conv.log_q(j + 1) - conv.log_q(j));
  }
  double fib_a = 1.0;
  double fib_b = 1.0;
  double fib_sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    fib_sum += 1.0 / std::sqrt(fib_a);
    const double next = fib_a + fib_b;
    fib_a = fib_b;
    fib_b = next;
  }
  rep.tail_estimate = 0.5 * std::numbers::sqrt2 * recent_log_ratio * fib_sum *
                      std::exp(-0.5 * conv.log_q(J + 1));
  if (rep.tail_estimate <= opt.tail_tolerance) {
    rep.verdict = Verdict::ConvergesAbsolutely;
    rep.reason = "absolute-value series tail below tolerance under geometric denominator growth";
  } else {
    rep.reason = "tail of the absolute-value series not yet below tolerance";
  }
  return rep;
}

DivergenceFit rational_divergence_slope(const mpz_class& p, const mpz_class& q,
                                        const std::vector<std::uint64_t>& N_grid,
                                        const NaiveOptions& opt) {
  if (q < 1) throw std::domain_error("q must be positive");
  if (mpz_fdiv_ui(q.get_mpz_t(), 4) == 2) {
    throw std::domain_error("no divergence claim when q = 2 mod 4");
  }
  if (N_grid.size() < 2) throw std::invalid_argument("need at least two N values");
  mpz_class pr;
  mpz_fdiv_r(pr.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  const Rational x(pr, q);
  DivergenceFit fit;
  fit.N = N_grid;
  std::sort(fit.N.begin(), fit.N.end());
  const auto sums = f_partial_naive_checkpoints(x, fit.N, opt);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    const double lx = std::log(static_cast<double>(fit.N[i]));
    const double y = std::abs(sums[i]);
    fit.abs_F.push_back(y);
    sx += lx;
    sy += y;
    sxx += lx * lx;
    sxy += lx * y;
  }
  const double n = static_cast<double>(sums.size());
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  const GaussSumValue th = gauss_sum_fast(x.num(), q);
  fit.predicted = std::sqrt(th.mod_sq()) / std::sqrt(q.get_d());
  return fit;
}

}  // namespace weylab
