#include "weylab/harness.hpp"

#include "weylab/bmo_bounds.hpp"
#include "weylab/cf_engine.hpp"
#include "weylab/gauss_sums.hpp"
#include "weylab/oscillation_lab.hpp"
#include "weylab/rng.hpp"
#include "weylab/theta_series.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace weylab {

namespace {

template <class T>
T param(const ExperimentConfig& cfg, const char* key, T fallback) {
  const auto it = cfg.params.find(key);
  if (it == cfg.params.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("parameter '") + key + "' has the wrong type");
  }
}

std::string required_str(const ExperimentConfig& cfg, const char* key) {
  const auto it = cfg.params.find(key);
  if (it == cfg.params.end() || it->is_null()) throw ValidationError(std::string("missing --") + key);
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw ValidationError(std::string("parameter '") + key + "' has the wrong type");
}

mpz_class parse_int(const std::string& s, const char* what) {
  mpz_class v;
  if (s.empty() || v.set_str(s, 10) != 0) throw ValidationError(std::string("invalid integer for ") + what + ": " + s);
  return v;
}

Rational parse_point(const std::string& s) {
  Rational x;
  try {
    x = Rational::parse(s);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("invalid rational: ") + e.what());
  }
  if (!x.in_unit_interval()) throw ValidationError("point must satisfy 0 <= x < 1");
  return x;
}

QuotientRule parse_rule(const std::string& r) {
  if (r == "squares") return rules::squares();
  if (r == "tower") return rules::tower();
  if (r.rfind("constant:", 0) == 0) {
    const unsigned long a = std::stoul(r.substr(9));
    if (a < 1) throw ValidationError("constant rule needs a >= 1");
    return rules::constant(a);
  }
  throw ValidationError("unknown rule '" + r + "' (constant:A, squares, tower)");
}

ContinuedFraction cf_from_params(const ExperimentConfig& cfg, std::size_t J) {
  const std::string rule = param<std::string>(cfg, "rule", "");
  if (!rule.empty()) {
    const std::size_t budget = param<std::size_t>(cfg, "bit_budget", kDefaultBitBudget);
    return synthetic_cf(parse_rule(rule), J, budget);
  }
  const CfConvention conv = parse_convention(param<std::string>(cfg, "convention", "last-not-one"));
  return cf_of_rational(parse_point(required_str(cfg, "x")), conv);
}

ojson complex_json(const cplx& z) { return ojson{{"re", z.real()}, {"im", z.imag()}}; }

// ---------------------------------------------------------------- cf
void run_cf(const ExperimentConfig& cfg, RunRecord& rec) {
  const std::size_t J = param<std::size_t>(cfg, "j", 40);
  const std::size_t budget = param<std::size_t>(cfg, "bit_budget", kDefaultBitBudget);
  const ContinuedFraction cf = cf_from_params(cfg, J);
  const ConvergentSeq conv = convergents(cf, cf.size(), budget);
  ojson q = ojson::array();
  for (const auto& a : cf.quotients) q.push_back(a.get_str());
  for (const auto& a : cf.log_tail) q.push_back(ojson{{"log", a.log_value}, {"residue4", a.residue4}});
  ojson c = ojson::array();
  bool det_ok = true;
  for (std::size_t j = 0; j < conv.entries.size(); ++j) {
    const auto& e = conv.entries[j];
    c.push_back(ojson{{"j", j}, {"p", e.p.get_str()}, {"q", e.q.get_str()}});
    if (j > 0) {
      const auto& prev = conv.entries[j - 1];
      const mpz_class det = e.p * prev.q - prev.p * e.q;
      det_ok = det_ok && det == ((j - 1) % 2 == 0 ? 1 : -1);
    }
  }
  for (std::size_t i = 0; i < conv.log_tail.size(); ++i) {
    const auto& e = conv.log_tail[i];
    c.push_back(ojson{{"j", conv.entries.size() + i}, {"log_p", e.log_p}, {"log_q", e.log_q},
                      {"q_residue4", e.q_residue4}});
  }
  rec.payload["convention"] = to_string(cf.convention);
  rec.payload["quotients"] = q;
  rec.payload["convergents"] = c;
  rec.payload["determinant_identity"] = det_ok;
  if (cf.exact() && param<std::string>(cfg, "rule", "").empty()) {
    const FundamentalInterval I = fundamental_interval_of_prefix(cf);
    rec.payload["fundamental_interval"] = ojson{{"lo", I.lo.to_string()},
                                                {"hi", I.hi.to_string()},
                                                {"length", I.length().to_string()},
                                                {"q", I.q.get_str()},
                                                {"q_prev", I.q_prev.get_str()}};
  }
}

// ---------------------------------------------------------------- gauss
void run_gauss(const ExperimentConfig& cfg, RunRecord& rec) {
  const mpz_class p = parse_int(required_str(cfg, "p"), "p");
  const mpz_class q = parse_int(required_str(cfg, "q"), "q");
  const std::string method = param<std::string>(cfg, "method", "fast");
  GaussSumValue v;
  try {
    if (method == "fast") v = gauss_sum_fast(p, q);
    else if (method == "direct") v = gauss_sum_direct(p, q, param<std::uint64_t>(cfg, "cap", kDefaultDirectCap));
    else throw ValidationError("method must be fast or direct");
  } catch (const std::domain_error& e) {
    throw ValidationError(e.what());
  }
  rec.payload = ojson{{"p", p.get_str()},        {"q", q.get_str()},       {"method", method},
                      {"re", v.re},              {"im", v.im},             {"mod_sq", v.mod_sq()},
                      {"claimed_mod_sq", v.claimed_mod_sq}, {"class", to_string(v.q_class)}};
}

// ---------------------------------------------------------------- eval
void run_eval(const ExperimentConfig& cfg, RunRecord& rec) {
  const Rational x = parse_point(required_str(cfg, "x"));
  const std::string method = param<std::string>(cfg, "method", "naive");
  NaiveOptions naive;
  naive.cap = param<std::uint64_t>(cfg, "cap", kDefaultNaiveCap);
  naive.threads = param<unsigned>(cfg, "threads", 1);
  EvalResult r;
  std::string n_text = param<std::string>(cfg, "n", "");
  try {
    if (method == "naive") {
      if (n_text.empty()) throw ValidationError("naive evaluation needs --n");
      const mpz_class n = parse_int(n_text, "n");
      if (n < 0 || !n.fits_ulong_p()) throw ValidationError("n out of range");
      r = f_partial_naive(x, n.get_ui(), naive);
    } else if (method == "hybrid") {
      HybridOptions opt;
      opt.threshold = param<std::uint64_t>(cfg, "threshold", 1000);
      opt.C = param<double>(cfg, "error_constant", kDefaultErrorConstant);
      opt.naive = naive;
      if (!n_text.empty()) opt.target = parse_int(n_text, "n");
      r = f_eval_hybrid(x, opt);
    } else {
      throw ValidationError("method must be naive or hybrid");
    }
  } catch (const std::domain_error& e) {
    throw ValidationError(e.what());
  }
  rec.payload = ojson{{"x", x.to_string()},
                      {"n", n_text.empty() ? ojson(nullptr) : ojson(n_text)},
                      {"value_re", r.value.real()},
                      {"value_im", r.value.imag()},
                      {"error_bound", r.error_bound},
                      {"error_bound_kind", r.method == EvalMethod::Naive ? "rounding" : "empirical-constant"},
                      {"terms_used", r.terms_used},
                      {"method", to_string(r.method)}};
}

// ---------------------------------------------------------------- proxy
void run_proxy(const ExperimentConfig& cfg, RunRecord& rec) {
  const std::size_t J = param<std::size_t>(cfg, "j", 60);
  const ContinuedFraction cf = cf_from_params(cfg, J + 2);
  ConvergenceOptions opt;
  opt.divergence_threshold = param<double>(cfg, "divergence_threshold", opt.divergence_threshold);
  opt.tail_tolerance = param<double>(cfg, "tail_tolerance", opt.tail_tolerance);
  const ConvergenceReport rep = convergence_report(cf, J, opt);
  CsvTable t;
  t.columns = {"j", "term_re", "term_im", "log_magnitude", "partial_re", "partial_im", "abs_bound"};
  ojson terms = ojson::array();
  for (std::size_t i = 0; i < rep.trace.terms.size(); ++i) {
    const auto& tr = rep.trace;
    std::vector<ojson> row{i + 1, tr.terms[i].real(), tr.terms[i].imag(), tr.log_magnitudes[i],
                           tr.partial_sums[i].real(), tr.partial_sums[i].imag(), rep.abs_bound_partial[i]};
    terms.push_back(ojson{{"j", i + 1},
                          {"term", complex_json(tr.terms[i])},
                          {"log_magnitude", tr.log_magnitudes[i]},
                          {"partial_sum", complex_json(tr.partial_sums[i])},
                          {"abs_bound", rep.abs_bound_partial[i]}});
    t.rows.push_back(std::move(row));
  }
  rec.payload = ojson{{"terms", terms},
                      {"tail_estimate", rep.tail_estimate},
                      {"max_log_term", rep.max_log_term},
                      {"verdict", to_string(rep.verdict)},
                      {"reason", rep.reason}};
  rec.table = std::move(t);
  if (rep.verdict == Verdict::Inconclusive) rec.exit_code = kExitInconclusive;
}

// ---------------------------------------------------------------- levelset
void run_levelset(const ExperimentConfig& cfg, RunRecord& rec) {
  const mpz_class p = parse_int(required_str(cfg, "p"), "p");
  const mpz_class q = parse_int(required_str(cfg, "q"), "q");
  if (q < 1 || p < 0 || p >= q) throw ValidationError("need 0 <= p < q");
  const Rational pq(p, q);
  if (pq.den() != q) throw ValidationError("p/q must be reduced");
  const double lo = param<double>(cfg, "lambda_min", 0.5);
  const double hi = param<double>(cfg, "lambda_max", 2.0);
  const std::size_t steps = param<std::size_t>(cfg, "steps", 16);
  const std::size_t M = param<std::size_t>(cfg, "samples", 100000);
  if (M < 1000) throw ValidationError("levelset needs --samples >= 1000");
  if (!(hi > lo) || steps < 2) throw ValidationError("need lambda_max > lambda_min and steps >= 2");
  EvalConfig ec;
  ec.error_target = param<double>(cfg, "error_target", ec.error_target);
  ec.threads = param<unsigned>(cfg, "threads", 1);
  const FundamentalInterval I = fundamental_interval(pq);
  const LevelSetEstimate est = level_set_curve(SampleInterval::of(I), linear_grid(lo, hi, steps), M, *cfg.seed, ec);
  CsvTable t;
  t.columns = {"lambda", "survival", "count", "ci"};
  for (std::size_t i = 0; i < est.lambda_grid.size(); ++i) {
    t.rows.push_back({est.lambda_grid[i], est.survival[i], est.counts[i], est.ci_halfwidth[i]});
  }
  const double qd = q.get_d();
  ojson c_q_sqrt_q = nullptr;
  if (mpz_fdiv_ui(q.get_mpz_t(), 4) == 0) c_q_sqrt_q = std::numbers::sqrt2 * std::sqrt(qd);
  else if (mpz_fdiv_ui(q.get_mpz_t(), 2) == 1) c_q_sqrt_q = 2.0 * std::sqrt(qd);
  rec.payload = ojson{{"p", p.get_str()},
                      {"q", q.get_str()},
                      {"samples", M},
                      {"mean_re", est.mean.real()},
                      {"mean_im", est.mean.imag()},
                      {"mean_stderr", est.mean_std_error},
                      {"max_eval_error_bound", est.max_f_error},
                      {"slope", est.fit ? ojson(est.fit->slope) : ojson(nullptr)},
                      {"ci", est.fit ? ojson::array({est.fit->ci_lo, est.fit->ci_hi}) : ojson(nullptr)},
                      {"points_used", est.fit ? est.fit->points_used : 0},
                      {"sqrt_2q", std::sqrt(2.0 * qd)},
                      {"c_q_sqrt_q", c_q_sqrt_q},
                      {"bands", "empirical"},
                      {"table", ojson{{"columns", t.columns}, {"rows", t.rows}}}};
  rec.table = std::move(t);
  if (!est.fit) rec.exit_code = kExitInconclusive;
}

// ---------------------------------------------------------------- metric
void run_metric(const ExperimentConfig& cfg, RunRecord& rec) {
  const Rational pq = parse_point(required_str(cfg, "p") + "/" + required_str(cfg, "q"));
  const FundamentalInterval I = fundamental_interval(pq);
  const std::size_t j = param<std::size_t>(cfg, "j", I.depth() + 1);
  const std::size_t M = param<std::size_t>(cfg, "samples", 100000);
  const std::size_t kmax = param<std::size_t>(cfg, "kmax", 20);
  if (j <= I.depth()) throw ValidationError("--j must exceed the prefix length " + std::to_string(I.depth()));
  const MetricStats st = partial_quotient_histogram(I, j, M, *cfg.seed, kmax);
  CsvTable t;
  t.columns = {"k", "count", "frequency", "reference", "ratio"};
  bool within = true;
  for (std::size_t k = 1; k <= kmax; ++k) {
    const double f = st.frequency[k - 1];
    const double ratio = f / st.reference[k - 1];
    within = within && ratio <= st.band && ratio >= 1.0 / st.band;
    t.rows.push_back({k, st.counts[k - 1], f, st.reference[k - 1], ratio});
  }
  rec.payload = ojson{{"p", pq.num().get_str()},
                      {"q", pq.den().get_str()},
                      {"j", j},
                      {"samples", M},
                      {"overflow", st.overflow},
                      {"c", st.frequency[0]},
                      {"band", st.band},
                      {"within_band", within},
                      {"table", ojson{{"columns", t.columns}, {"rows", t.rows}}}};
  rec.table = std::move(t);
}

// ---------------------------------------------------------------- bmo
void run_bmo(const ExperimentConfig& cfg, RunRecord& rec) {
  SeriesSpec spec;
  try {
    spec = SeriesSpec::parse(param<std::string>(cfg, "freq", "n^2"), param<std::string>(cfg, "coeff", "1/n"));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  const std::string twist = param<std::string>(cfg, "twist", "none");
  if (twist == "random") spec = spec.with_twist(TwistKind::RandomPhase, *cfg.seed);
  else if (twist == "sign") spec = spec.with_twist(TwistKind::RandomSign, *cfg.seed);
  else if (twist != "none") throw ValidationError("twist must be none, random or sign");
  const std::size_t nmax = param<std::size_t>(cfg, "nmax", 100000);
  KappaOptions ko;
  ko.grid_points = param<std::size_t>(cfg, "grid_points", ko.grid_points);
  ko.st.sum_to = param<std::size_t>(cfg, "sum_to", ko.st.sum_to);
  BoundReport r;
  try {
    r = kappa_bound(spec, nmax, ko);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  const GapDelta gd = gap_delta(spec, 1, std::min<std::size_t>(nmax, spec.finite_limit - 1));
  // S, T and the tail sums at about 100 geometrically spaced N
  ojson sampled = ojson::array();
  std::size_t last = 0;
  for (double v : geometric_grid(1.0, static_cast<double>(r.S.size()), 100)) {
    const auto N = static_cast<std::size_t>(std::llround(v));
    if (N == last) continue;
    last = N;
    sampled.push_back(ojson{{"N", N}, {"S", r.S[N - 1]}, {"T", r.T[N - 1]}, {"tail_sq", r.tail_sq[N - 1]}});
  }
  ojson boundary = ojson::array();
  for (bool b : r.boundary_min) boundary.push_back(b);
  CsvTable t;
  t.columns = {"epsilon", "kappa_eps", "argmin_N", "boundary", "heuristic_N", "heuristic_value"};
  for (std::size_t i = 0; i < r.epsilon_grid.size(); ++i) {
    t.rows.push_back({r.epsilon_grid[i], r.kappa_eps[i], r.argmin_N[i], r.boundary_min[i] ? 1 : 0,
                      r.heuristic_N[i], r.heuristic_value[i]});
  }
  rec.payload = ojson{{"freq", spec.freq_text},
                      {"coeff", spec.coeff_text},
                      {"twist", twist},
                      {"nmax", r.S.size()},
                      {"kappa", r.kappa},
                      {"kappa_kind", "grid-estimate"},
                      {"kappa_epsilon", r.kappa_epsilon},
                      {"bounded_on_grid", r.bounded_on_grid},
                      {"epsilon_grid", r.epsilon_grid},
                      {"kappa_eps", r.kappa_eps},
                      {"argmin_N", r.argmin_N},
                      {"boundary_min", boundary},
                      {"heuristic_N", r.heuristic_N},
                      {"heuristic_value", r.heuristic_value},
                      {"sequences", sampled},
                      {"gap_delta", std::isfinite(gd.delta) ? ojson(gd.delta) : ojson("infinite")},
                      {"gap_delta_inconclusive", gd.inconclusive},
                      {"norm_limit_bound",
                       gd.delta > 0 && std::isfinite(gd.delta) ? ojson(norm_limit_bound(gd.delta)) : ojson(nullptr)}};
  rec.table = std::move(t);
  if (!r.bounded_on_grid) rec.exit_code = kExitInconclusive;
}

// ---------------------------------------------------------------- hilbert
std::vector<cplx> gaussian_weights(rng::Stream& s, std::size_t n) {
  std::vector<cplx> w(n);
  for (auto& z : w) {
    const double u1 = 1.0 - s.unit();
    const double u2 = s.unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    z = {r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
  }
  return w;
}

void run_hilbert(const ExperimentConfig& cfg, RunRecord& rec) {
  const std::size_t instances = param<std::size_t>(cfg, "instances", 1000);
  const std::size_t size = param<std::size_t>(cfg, "size", 40);
  const std::size_t squares = param<std::size_t>(cfg, "squares", 300);
  if (size < 1) throw ValidationError("size must be >= 1");
  const std::uint64_t seed = *cfg.seed;
  std::size_t violations = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    rng::Stream s(seed, i);
    // distinct integers from [0, 10 size): partial Fisher-Yates
    std::vector<double> pool(10 * size);
    for (std::size_t k = 0; k < pool.size(); ++k) pool[k] = static_cast<double>(k);
    for (std::size_t k = 0; k < size; ++k) {
      const std::size_t pick = k + static_cast<std::size_t>(s.unit() * static_cast<double>(pool.size() - k));
      std::swap(pool[k], pool[pick]);
    }
    std::vector<double> lambdas(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    const std::vector<double> deltas(size, 1.0);
    const HilbertResult h = hilbert_check(lambdas, deltas, gaussian_weights(s, size));
    if (!h.holds) ++violations;
    if (h.rhs > 0) worst = std::max(worst, h.lhs_modulus / h.rhs);
  }
  // frequencies n^2 with the neighbour gaps M(n) as separations
  const SeriesSpec sq = SeriesSpec::power_law(2, 1.0);
  std::vector<double> lam, del;
  for (std::size_t n = 1; n <= squares; ++n) {
    lam.push_back(sq.nu(n));
    del.push_back(n == squares ? sq.nu(n) - sq.nu(n - 1) : neighbour_gap(sq, n));
  }
  rng::Stream s(seed, instances);
  const HilbertResult hs = hilbert_check(lam, del, gaussian_weights(s, squares));
  if (!hs.holds) ++violations;
  rec.payload = ojson{{"instances", instances},
                      {"size", size},
                      {"violations", violations},
                      {"worst_ratio", worst},
                      {"squares", ojson{{"points", squares},
                                        {"lhs_modulus", hs.lhs_modulus},
                                        {"rhs", hs.rhs},
                                        {"ratio", hs.lhs_modulus / hs.rhs},
                                        {"holds", hs.holds}}},
                      {"pass", violations == 0}};
  if (violations != 0) rec.exit_code = kExitInconclusive;
}

// ---------------------------------------------------------------- fefferman
std::vector<double> read_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read coefficient file " + path);
  std::vector<double> a;
  std::string line;
  std::size_t next = 0;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<double> fields;
    double v = 0.0;
    while (ls >> v) fields.push_back(v);
    if (fields.empty()) continue;
    std::size_t k = next;
    double value = fields[0];
    if (fields.size() >= 2) {
      if (fields[0] < 0 || fields[0] != std::floor(fields[0])) throw ValidationError("index must be a nonnegative integer");
      k = static_cast<std::size_t>(fields[0]);
      value = fields[1];
    }
    if (value < 0) throw ValidationError("coefficients must be nonnegative");
    if (a.size() <= k) a.resize(k + 1, 0.0);
    a[k] += value;
    next = k + 1;
  }
  return a;
}

void run_fefferman(const ExperimentConfig& cfg, RunRecord& rec) {
  const std::vector<double> a = read_coefficients(required_str(cfg, "coeff_file"));
  const auto Ns = param<std::vector<std::size_t>>(cfg, "n", {1});
  CsvTable t;
  t.columns = {"N", "stat"};
  ojson values = ojson::array();
  for (std::size_t N : Ns) {
    if (N < 1) throw ValidationError("block lengths must be >= 1");
    const double v = fefferman_stat(a, N);
    values.push_back(ojson{{"N", N}, {"stat", v}});
    t.rows.push_back({N, v});
  }
  rec.payload = ojson{{"K_max", a.empty() ? 0 : a.size() - 1}, {"values", values}};
  rec.table = std::move(t);
}

}  // namespace

ojson ExperimentConfig::to_json() const {
  ojson j{{"subcommand", subcommand}, {"params", params}};
  j["seed"] = seed ? ojson(*seed) : ojson(nullptr);
  j["output"] = output;
  j["format"] = format;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const ojson& j) {
  ExperimentConfig c;
  c.subcommand = j.at("subcommand").get<std::string>();
  c.params = j.value("params", ojson::object());
  if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
  c.output = j.value("output", std::string());
  c.format = j.value("format", std::string("json"));
  return c;
}

ojson RunRecord::to_json() const {
  return ojson{{"schema_version", kSchemaVersion}, {"tool_version", tool_version},
               {"config", config.to_json()},      {"wall_seconds", wall_seconds},
               {"exit_code", exit_code},          {"payload", payload}};
}

bool is_stochastic(const ExperimentConfig& cfg) {
  if (cfg.subcommand == "levelset" || cfg.subcommand == "metric" || cfg.subcommand == "hilbert") return true;
  if (cfg.subcommand == "bmo") {
    const auto it = cfg.params.find("twist");
    return it != cfg.params.end() && it->is_string() && it->get<std::string>() != "none";
  }
  return false;
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
  if (is_stochastic(cfg) && !cfg.seed) throw ValidationError(cfg.subcommand + " is stochastic and needs --seed");
  if (cfg.format != "json" && cfg.format != "csv") throw ValidationError("format must be json or csv");
  RunRecord rec;
  rec.config = cfg;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string& s = cfg.subcommand;
  if (s == "cf") run_cf(cfg, rec);
  else if (s == "gauss") run_gauss(cfg, rec);
  else if (s == "eval") run_eval(cfg, rec);
  else if (s == "proxy") run_proxy(cfg, rec);
  else if (s == "levelset") run_levelset(cfg, rec);
  else if (s == "metric") run_metric(cfg, rec);
  else if (s == "bmo") run_bmo(cfg, rec);
  else if (s == "hilbert") run_hilbert(cfg, rec);
  else if (s == "fefferman") run_fefferman(cfg, rec);
  else throw ValidationError("unknown subcommand '" + s + "'");
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      const ojson& v = row[i];
      if (v.is_number_float()) out += format_number(v.get<double>());
      else if (v.is_number()) out += v.dump();
      else if (v.is_string()) out += v.get<std::string>();
      else if (v.is_boolean()) out += v.get<bool>() ? "1" : "0";
      else out += "";
    }
    out += '\n';
  }
  return out;
}

void emit(const RunRecord& record, const std::string& format) {
  std::string text;
  if (format == "csv") {
    if (record.table) {
      text = to_csv(*record.table);
    } else {
      // one row of the scalar payload fields
      CsvTable t;
      t.rows.emplace_back();
      for (const auto& [k, v] : record.payload.items()) {
        if (v.is_structured()) continue;
        t.columns.push_back(k);
        t.rows[0].push_back(v);
      }
      text = to_csv(t);
    }
  } else {
    text = record.to_json().dump(2) + "\n";
  }
  if (record.config.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(record.config.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + record.config.output);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + record.config.output);
}

}  // namespace weylab
