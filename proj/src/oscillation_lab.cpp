#include "weylab/oscillation_lab.hpp"

#include "weylab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weylab {

namespace {

double log_of(const mpz_class& v) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace

std::vector<double> linear_grid(double lo, double hi, std::size_t steps) {
  std::vector<double> g;
  if (steps == 0) return g;
  if (steps == 1) return {lo};
  for (std::size_t i = 0; i < steps; ++i) {
    g.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return g;
}

EvalResult f_eval_adaptive(const Rational& x, const EvalConfig& cfg) {
  const PointExpansion e = PointExpansion::of(x);
  HybridOptions opt;
  opt.C = cfg.C;
  opt.cut_at_threshold = true;
  opt.naive.cap = cfg.max_threshold;
  std::optional<std::uint64_t> chosen;
  for (std::uint64_t T = cfg.min_threshold; T <= cfg.max_threshold; T *= 2) {
    opt.threshold = T;
    double bound = 0.0;
    try {
      bound = hybrid_error_bound(e, opt);
    } catch (const InsufficientConvergents&) {
      break;
    }
    chosen = T;
    if (bound <= cfg.error_target) break;
  }
  if (!chosen) throw InsufficientConvergents("point has no reliable block above the minimum threshold");
  opt.threshold = *chosen;
  return f_eval_hybrid(e, opt);
}

SampleSet sample_oscillation(const SampleInterval& I, std::size_t M, std::uint64_t seed,
                             const EvalConfig& cfg, const Integrand& hook) {
  SampleSet set;
  set.interval = I;
  set.samples.resize(M);
  parallel_for(M, cfg.threads, [&](std::size_t i) {
    OscillationSample& s = set.samples[i];
    s.x = sample_uniform(I, seed, i);
    if (hook) {
      s.f_value = hook(s.x);
    } else {
      const EvalResult r = f_eval_adaptive(s.x, cfg);
      s.f_value = r.value;
      s.f_error = r.error_bound;
    }
  });
  std::vector<cplx> values(M);
  for (std::size_t i = 0; i < M; ++i) {
    values[i] = set.samples[i].f_value;
    set.max_f_error = std::max(set.max_f_error, set.samples[i].f_error);
  }
  set.mean.samples = M;
  if (M == 0) return set;
  set.mean.mean = pairwise_sum(values.data(), M) / static_cast<double>(M);
  std::vector<double> sq(M);
  for (std::size_t i = 0; i < M; ++i) {
    set.samples[i].osc = std::abs(values[i] - set.mean.mean);
    sq[i] = set.samples[i].osc * set.samples[i].osc;
  }
  if (M > 1) {
    const double var = pairwise_sum(sq.data(), M) / static_cast<double>(M - 1);
    set.mean.std_error = std::sqrt(var / static_cast<double>(M));
  }
  return set;
}

MeanEstimate estimate_F_I(const SampleInterval& I, std::size_t M, std::uint64_t seed,
                          const EvalConfig& cfg, const Integrand& hook) {
  if (M < 100) throw std::invalid_argument("estimate_F_I needs at least 100 samples");
  return sample_oscillation(I, M, seed, cfg, hook).mean;
}

ProxyValue oscillation_proxy(const Rational& x, const mpz_class& q, double C) {
  const PointExpansion e = PointExpansion::of(x);
  const std::size_t R = e.reliable_last;
  ProxyValue out;
  for (std::size_t j = 1; j < R; ++j) {
    if (e.q(j) < q) continue;
    const GaussSumValue th = gauss_sum_fast(e.p(j), e.q(j));
    const double log_ratio = log_of(e.q(j + 1)) - log_of(e.q(j));
    out.value += th.value() * (0.5 * std::exp(-0.5 * log_of(e.q(j))) * log_ratio);
    ++out.terms;
  }
  if (out.terms == 0) throw InsufficientConvergents("no reliable convergent with q_j >= q");
  out.error_bound = C * (1.0 / std::sqrt(q.get_d()) + 4.5 * std::exp(-0.5 * log_of(e.q(R))));
  return out;
}

double wilson_halfwidth(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  return z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
}

LevelSetEstimate level_set_from_samples(const SampleSet& set, const std::vector<double>& lambda_grid) {
  if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end())) {
    throw std::invalid_argument("lambda grid must be increasing");
  }
  LevelSetEstimate est;
  est.lambda_grid = lambda_grid;
  est.samples = set.samples.size();
  est.q = set.interval.q;
  est.mean = set.mean.mean;
  est.mean_std_error = set.mean.std_error;
  est.max_f_error = set.max_f_error;
  std::vector<double> osc;
  osc.reserve(set.samples.size());
  for (const auto& s : set.samples) osc.push_back(s.osc);
  std::sort(osc.begin(), osc.end());
  for (double lambda : lambda_grid) {
    std::uint64_t count = est.samples;
    if (lambda > 0.0) {
      count = static_cast<std::uint64_t>(osc.end() - std::upper_bound(osc.begin(), osc.end(), lambda));
    }
    est.counts.push_back(count);
    est.survival.push_back(est.samples ? static_cast<double>(count) / static_cast<double>(est.samples) : 0.0);
    est.ci_halfwidth.push_back(wilson_halfwidth(count, est.samples));
  }
  return est;
}

LevelSetEstimate level_set_curve(const SampleInterval& I, const std::vector<double>& lambda_grid,
                                 std::size_t M, std::uint64_t seed, const EvalConfig& cfg) {
  if (M < 1000) throw std::invalid_argument("level_set_curve needs at least 1000 samples");
  const SampleSet set = sample_oscillation(I, M, seed, cfg);
  LevelSetEstimate est = level_set_from_samples(set, lambda_grid);
  try {
    est.fit = decay_slope_fit(est);
  } catch (const InsufficientData&) {
    est.fit.reset();
  }
  return est;
}

SlopeFit weighted_log_fit(const std::vector<double>& lambda, const std::vector<double>& survival,
                          const std::vector<double>& weight) {
  const std::size_t n = lambda.size();
  if (n < 2 || survival.size() != n || weight.size() != n) {
    throw InsufficientData("weighted fit needs at least two points");
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += weight[i];
    sx += weight[i] * lambda[i];
    sy += weight[i] * std::log(survival[i]);
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = lambda[i] - mx;
    sxx += weight[i] * dx * dx;
    sxy += weight[i] * dx * (std::log(survival[i]) - my);
  }
  SlopeFit fit;
  fit.slope = -sxy / sxx;
  fit.intercept = my + fit.slope * mx;
  const double se = 1.0 / std::sqrt(sxx);
  fit.ci_lo = fit.slope - 1.96 * se;
  fit.ci_hi = fit.slope + 1.96 * se;
  fit.points_used = n;
  return fit;
}

SlopeFit decay_slope_fit(const LevelSetEstimate& est, std::uint64_t min_count) {
  std::vector<double> lambda, surv, weight;
  for (std::size_t i = 0; i < est.lambda_grid.size(); ++i) {
    const std::uint64_t c = est.counts[i];
    if (c < min_count || c >= est.samples) continue;
    const double p = est.survival[i];
    lambda.push_back(est.lambda_grid[i]);
    surv.push_back(p);
    // inverse variance of log(p_hat)
    weight.push_back(static_cast<double>(c) / (1.0 - p));
  }
  if (lambda.size() < 4) {
    throw InsufficientData("slope fit needs at least 4 grid points with enough exceedances");
  }
  return weighted_log_fit(lambda, surv, weight);
}

MetricStats partial_quotient_histogram(const FundamentalInterval& I, std::size_t j, std::size_t M,
                                       std::uint64_t seed, std::size_t k_max) {
  if (j <= I.depth()) throw std::invalid_argument("j must exceed the prefix length");
  if (k_max < 1) throw std::invalid_argument("k_max must be positive");
  MetricStats st;
  st.j = j;
  st.samples = M;
  st.counts.assign(k_max, 0);
  for (std::size_t i = 0; i < M; ++i) {
    const Rational x = sample_uniform(I, seed, i);
    const auto a = cf_prefix(x, j + 1);
    if (a.size() <= j || a[j] > k_max) {
      ++st.overflow;
      continue;
    }
    ++st.counts[a[j].get_ui() - 1];
  }
  for (std::size_t k = 0; k < k_max; ++k) {
    st.frequency.push_back(static_cast<double>(st.counts[k]) / static_cast<double>(M));
  }
  const double c = st.frequency[0];
  for (std::size_t k = 1; k <= k_max; ++k) st.reference.push_back(c / static_cast<double>(k * k));
  return st;
}

RestrictedMeasure restricted_measure(const FundamentalInterval& I, const QuotientBound& A,
                                     std::size_t n_max, std::size_t M, std::uint64_t seed) {
  const std::size_t j0 = I.depth();
  RestrictedMeasure out;
  out.samples = M;
  std::vector<std::optional<double>> bounds(n_max + 1);
  for (std::size_t n = 1; n <= n_max; ++n) {
    bounds[n] = A(n);
    if (bounds[n]) {
      if (*bounds[n] < 1.0) throw std::invalid_argument("quotient bounds must be >= 1");
      out.S += 1.0 / *bounds[n];
    }
  }
  for (std::size_t i = 0; i < M; ++i) {
    const Rational x = sample_uniform(I, seed, i);
    const auto a = cf_prefix(x, j0 + n_max + 1);
    bool ok = true;
    for (std::size_t n = 1; n <= n_max && ok; ++n) {
      if (!bounds[n]) continue;
      if (a.size() <= j0 + n || a[j0 + n].get_d() > *bounds[n]) ok = false;
    }
    if (ok) ++out.hits;
  }
  if (out.hits < 100) throw InsufficientData("restricted set received fewer than 100 hits");
  out.deficit = std::log(static_cast<double>(M) / static_cast<double>(out.hits));
  out.ratio = out.S > 0.0 ? out.deficit / out.S : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace weylab
