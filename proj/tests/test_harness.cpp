#include "doctest.h"

#include "weylab/harness.hpp"

#include <cstdio>
#include <fstream>

using namespace weylab;

namespace {

ExperimentConfig make(const std::string& sub, ojson params, std::optional<std::uint64_t> seed = {}) {
  ExperimentConfig c;
  c.subcommand = sub;
  c.params = std::move(params);
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("configs round-trip through JSON") {
  ExperimentConfig c = make("levelset", {{"p", "1"}, {"q", "4"}, {"lambda_min", 0.1}, {"steps", 16}},
                            std::uint64_t{18446744073709551615ULL});
  c.output = "out.csv";
  c.format = "csv";
  const ExperimentConfig back = ExperimentConfig::from_json(ojson::parse(c.to_json().dump()));
  CHECK(back.to_json() == c.to_json());
  CHECK(*back.seed == 18446744073709551615ULL);
  CHECK(back.params["lambda_min"].get<double>() == 0.1);
}

TEST_CASE("simple subcommands") {
  RunRecord g = run_experiment(make("gauss", {{"p", "1"}, {"q", "4"}}));
  CHECK(g.payload["mod_sq"].get<double>() == doctest::Approx(2.0));
  CHECK(g.exit_code == kExitOk);
  RunRecord e = run_experiment(make("eval", {{"x", "0/1"}, {"n", "3"}, {"method", "naive"}}));
  CHECK(e.payload["value_re"].get<double>() == doctest::Approx(1.8333333333333333));
  RunRecord p = run_experiment(make("proxy", {{"rule", "constant:1"}, {"j", 60}}));
  CHECK(p.payload["verdict"] == "converges-absolutely");
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(run_experiment(make("levelset", {{"p", "1"}, {"q", "4"}, {"samples", 1000}})), ValidationError);
  CHECK_THROWS_AS(run_experiment(make("gauss", {{"p", "2"}, {"q", "4"}})), ValidationError);
  CHECK_THROWS_AS(run_experiment(make("nope", ojson::object())), ValidationError);
  CHECK_THROWS_AS(run_experiment(make("eval", {{"x", "3/2"}, {"n", "3"}})), ValidationError);
  CHECK_THROWS_AS(run_experiment(make("bmo", {{"twist", "sign"}})), ValidationError);
}

TEST_CASE("seeded runs replay to identical payloads") {
  const ExperimentConfig c =
      make("levelset", {{"p", "1"}, {"q", "4"}, {"samples", 1000}, {"steps", 8}}, std::uint64_t{7});
  const RunRecord a = run_experiment(c);
  ExperimentConfig threaded = c;
  threaded.params["threads"] = 3;
  const RunRecord b = run_experiment(threaded);
  CHECK(a.payload.dump() == b.payload.dump());
  REQUIRE(a.table);
  CHECK(to_csv(*a.table) == to_csv(*b.table));
  CHECK(a.table->columns == std::vector<std::string>{"lambda", "survival", "count", "ci"});
  const RunRecord replay = run_experiment(ExperimentConfig::from_json(ojson::parse(a.to_json().dump())["config"]));
  CHECK(replay.payload.dump() == a.payload.dump());
}

TEST_CASE("CSV formatting") {
  CsvTable empty;
  empty.columns = {"lambda", "survival", "count", "ci"};
  CHECK(to_csv(empty) == "lambda,survival,count,ci\n");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CsvTable t;
  t.columns = {"a", "b"};
  t.rows.push_back({1, 0.5});
  CHECK(to_csv(t) == "a,b\n1,0.5\n");
}

TEST_CASE("bmo report arrays") {
  const RunRecord r = run_experiment(make("bmo", {{"freq", "n^2"}, {"coeff", "1/n"}, {"nmax", 2000}, {"sum_to", 100000}}));
  const auto& p = r.payload;
  CHECK(p["epsilon_grid"].size() == p["kappa_eps"].size());
  CHECK(p["epsilon_grid"].size() == p["argmin_N"].size());
  CHECK(p["kappa"].get<double>() > 0.0);
  CHECK(p["gap_delta"].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("emission to a file") {
  ExperimentConfig c = make("fefferman", {{"coeff_file", "harness_coeffs.txt"}, {"n", {1, 2}}});
  {
    std::ofstream f("harness_coeffs.txt");
    f << "# k a_k\n1 1\n4 0.5\n";
  }
  c.output = "harness_out.csv";
  const RunRecord r = run_experiment(c);
  emit(r, "csv");
  std::ifstream in("harness_out.csv");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == "N,stat\n1,1.25\n2,1.25\n");
  std::remove("harness_coeffs.txt");
  std::remove("harness_out.csv");
}
