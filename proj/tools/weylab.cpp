#include "weylab/harness.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

using weylab::ExperimentConfig;
using weylab::ojson;

namespace {

enum class Kind { Str, Int, Real, IntList };

struct Flag {
  const char* name;  // without dashes
  Kind kind;
  const char* help;
};

std::string key_of(const char* flag) {
  std::string k(flag);
  for (char& c : k) {
    if (c == '-') c = '_';
  }
  return k;
}

ojson convert(const std::string& text, Kind kind, const char* flag) {
  try {
    std::size_t used = 0;
    switch (kind) {
      case Kind::Str:
        return text;
      case Kind::Int: {
        if (text.empty() || text[0] == '-') break;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::Real: {
        const double v = std::stod(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::IntList: {
        ojson arr = ojson::array();
        std::size_t pos = 0;
        while (pos <= text.size()) {
          const std::size_t comma = std::min(text.find(',', pos), text.size());
          arr.push_back(convert(text.substr(pos, comma - pos), Kind::Int, flag));
          pos = comma + 1;
        }
        return arr;
      }
    }
  } catch (const std::logic_error&) {
  }
  throw weylab::ValidationError(std::string("invalid value for --") + flag + ": '" + text + "'");
}

struct Sub {
  CLI::App* app = nullptr;
  std::vector<Flag> flags;
  std::map<std::string, std::string> values;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string format = "json";
  std::string record;
  unsigned threads = 0;
  bool threads_flag = false;
};

Sub& add_sub(CLI::App& app, std::map<std::string, Sub>& subs, const std::string& name, const std::string& help,
             std::vector<Flag> flags, bool threads = false) {
  Sub& s = subs[name];
  s.app = app.add_subcommand(name, help);
  s.flags = std::move(flags);
  for (const Flag& f : s.flags) {
    s.values[f.name];
    s.app->add_option(std::string("--") + f.name, s.values[f.name], f.help);
  }
  s.app->add_option("--seed", s.seed, "64-bit seed (required for random runs)");
  s.app->add_option("--output,-o", s.output, "write here instead of stdout");
  s.app->add_option("--format", s.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  s.app->add_option("--record", s.record, "also write the JSON run record to this path");
  if (threads) {
    s.threads_flag = true;
    s.app->add_option("--threads", s.threads, "worker threads (results do not depend on it)");
  }
  return s;
}

ExperimentConfig build_config(const std::string& name, Sub& s) {
  ExperimentConfig cfg;
  cfg.subcommand = name;
  for (const Flag& f : s.flags) {
    if (s.app->count(std::string("--") + f.name) == 0) continue;
    cfg.params[key_of(f.name)] = convert(s.values[f.name], f.kind, f.name);
  }
  if (s.threads_flag && s.threads > 0) cfg.params["threads"] = s.threads;
  cfg.seed = s.seed;
  cfg.output = s.output;
  cfg.format = s.format;
  return cfg;
}

int finish(const weylab::RunRecord& rec, const std::string& record_path) {
  weylab::emit(rec, rec.config.format);
  if (!record_path.empty()) {
    std::ofstream out(record_path, std::ios::binary);
    out << rec.to_json().dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + record_path);
  }
  return rec.exit_code;
}

int replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw weylab::ValidationError("cannot read " + path);
  ojson stored;
  try {
    stored = ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw weylab::ValidationError(std::string("not a run record: ") + e.what());
  }
  ExperimentConfig cfg = ExperimentConfig::from_json(stored.at("config"));
  cfg.output.clear();
  const weylab::RunRecord rec = weylab::run_experiment(cfg);
  const bool same = rec.payload.dump() == stored.at("payload").dump();
  std::cout << ojson{{"record", path}, {"identical", same}}.dump(2) << "\n";
  return same ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weylab: Gauss sums, theta-series renormalization, oscillation statistics and BMO bounds"};
  app.require_subcommand(1);
  std::map<std::string, Sub> subs;

  add_sub(app, subs, "cf", "continued fraction, convergents and fundamental interval",
          {{"x", Kind::Str, "rational NUM/DEN in [0,1)"},
           {"rule", Kind::Str, "synthetic quotients: constant:A, squares, tower"},
           {"j", Kind::Int, "number of synthetic quotients"},
           {"convention", Kind::Str, "last-not-one or last-is-one"}});
  Sub& gauss = add_sub(app, subs, "gauss", "quadratic Gauss sum theta(p/q)",
                       {{"p", Kind::Str, "numerator"}, {"q", Kind::Str, "denominator"}});
  bool direct = false, fast = false;
  auto* dflag = gauss.app->add_flag("--direct", direct, "sum all q terms");
  gauss.app->add_flag("--fast", fast, "closed form (default)")->excludes(dflag);
  gauss.app->add_option("--cap", gauss.values["cap"], "largest q for --direct");
  gauss.flags.push_back({"cap", Kind::Int, ""});

  add_sub(app, subs, "eval", "partial sums of F(x) = sum e(n^2 x)/n",
          {{"x", Kind::Str, "rational NUM/DEN in [0,1)"},
           {"n", Kind::Str, "number of terms (hybrid: optional target)"},
           {"method", Kind::Str, "naive or hybrid"},
           {"threshold", Kind::Int, "hybrid naive threshold T"},
           {"error-constant", Kind::Real, "constant in the hybrid error bound"},
           {"cap", Kind::Int, "largest number of naive terms"}},
          true);
  add_sub(app, subs, "proxy", "convergence proxy series and verdict",
          {{"x", Kind::Str, "rational NUM/DEN in [0,1)"},
           {"rule", Kind::Str, "synthetic quotients: constant:A, squares, tower"},
           {"j", Kind::Int, "number of proxy terms"},
           {"divergence-threshold", Kind::Real, "term size treated as divergence"},
           {"tail-tolerance", Kind::Real, "tail size treated as convergence"}});
  add_sub(app, subs, "levelset", "oscillation level sets on the fundamental interval of p/q",
          {{"p", Kind::Str, "numerator"},
           {"q", Kind::Str, "denominator"},
           {"lambda-min", Kind::Real, "smallest level"},
           {"lambda-max", Kind::Real, "largest level"},
           {"steps", Kind::Int, "grid points"},
           {"samples", Kind::Int, "Monte Carlo samples"},
           {"error-target", Kind::Real, "per-sample evaluation error target"}},
          true);
  add_sub(app, subs, "metric", "distribution of a_j on the fundamental interval of p/q",
          {{"p", Kind::Str, "numerator"},
           {"q", Kind::Str, "denominator"},
           {"j", Kind::Int, "quotient index (default: one past the prefix)"},
           {"samples", Kind::Int, "Monte Carlo samples"},
           {"kmax", Kind::Int, "largest tabulated value"}});
  add_sub(app, subs, "bmo", "kappa bound for a gap Fourier series",
          {{"freq", Kind::Str, "n, n^K or B^n"},
           {"coeff", Kind::Str, "1, 1/n, 1/n^A or n^-A"},
           {"nmax", Kind::Int, "largest N"},
           {"twist", Kind::Str, "none, random or sign"},
           {"grid-points", Kind::Int, "epsilon grid size"},
           {"sum-to", Kind::Int, "explicit summation range for tails"}});
  add_sub(app, subs, "hilbert", "randomized Hilbert-inequality check",
          {{"instances", Kind::Int, "random instances"},
           {"size", Kind::Int, "points per instance"},
           {"squares", Kind::Int, "points in the n^2 instance"}});
  add_sub(app, subs, "fefferman", "block-sum statistic of a coefficient file",
          {{"coeff-file", Kind::Str, "lines 'k a_k' or one a_k per line"},
           {"n", Kind::IntList, "comma-separated block lengths"}});

  std::string replay_path;
  CLI::App* rp = app.add_subcommand("replay", "re-run a stored record and compare payloads");
  rp->add_option("record", replay_path, "record JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return weylab::kExitValidation;
  }

  try {
    if (rp->parsed()) return replay(replay_path);
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      ExperimentConfig cfg = build_config(name, s);
      if (name == "gauss" && direct) cfg.params["method"] = "direct";
      if (name == "cf" || name == "proxy") {
        if (const char* env = std::getenv("WEYLAB_BITBUDGET")) {
          cfg.params["bit_budget"] = convert(env, Kind::Int, "WEYLAB_BITBUDGET");
        }
      }
      return finish(weylab::run_experiment(cfg), s.record);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return weylab::kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return weylab::kExitInconclusive;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return weylab::kExitValidation;
}
