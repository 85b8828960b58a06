// SPDX-License-Identifier: Apache-2.0
#include "fdd/harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace fdd;

namespace {

std::string csv(const Report& r) {
  std::ostringstream o;
  r.write_csv(o);
  return o.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST_CASE("experiment names round-trip") {
  for (Experiment e : all_experiments())
    CHECK(parse_experiment(experiment_name(e)) == e);
  CHECK(all_experiments().size() == 8);
  CHECK(experiment_name(Experiment::ns_manufactured) == "ns-manufactured");
  CHECK_THROWS_AS(parse_experiment("heat"), ConfigError);
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(R"(
# two sweeps
experiment = poisson-mixed
mesh = 4 8, 12     # mixed separators
n_gamma = 1:9:2
degree_left = P1
quadrature = 2, 4
conforming = false
output = out.csv
)");
  CHECK(c.experiment == Experiment::poisson_mixed);
  CHECK(c.mesh == std::vector<int>{4, 8, 12});
  CHECK(c.n_gamma == std::vector<int>{1, 3, 5, 7, 9});
  CHECK(c.degree_left == Degree::P1);
  CHECK(c.degree_right == Degree::P2);
  CHECK(c.quadrature == std::vector<int>{2, 4});
  CHECK(c.conforming == MeshChoice::nonconforming);
  CHECK(c.output == "out.csv");
  // Omitted keys keep the experiment defaults.
  CHECK(c.samples == RunConfig::defaults(Experiment::poisson_mixed).samples);

  SUBCASE("text round-trip") {
    const RunConfig back = parse_config(c.to_text());
    CHECK(back.to_text() == c.to_text());
  }
  SUBCASE("experiment from the caller") {
    const RunConfig d = parse_config("mesh = 4\n", Experiment::infsup);
    CHECK(d.experiment == Experiment::infsup);
    CHECK(d.n_gamma == RunConfig::defaults(Experiment::infsup).n_gamma);
  }
}

TEST_CASE("config errors carry the line") {
  CHECK(error_of("experiment = poisson\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(error_of("experiment = poisson\nmesh = 4\nmesh = 8\n").find("line 3") != std::string::npos);
  CHECK(error_of("experiment = poisson\nmesh 4\n").find("line 2") != std::string::npos);
  CHECK(error_of("experiment = poisson\n\nmesh = x\n").find("line 3") != std::string::npos);
  CHECK_FALSE(error_of("experiment = poisson\nn_gamma = 9:1\n").empty());
  CHECK_FALSE(error_of("experiment = poisson\nn_gamma = 4\n").empty());   // even
  CHECK_FALSE(error_of("experiment = poisson\nmesh = 21\n").empty());     // odd N
  CHECK_FALSE(error_of("experiment = cavity\nmesh = 24\n").empty());
  CHECK_FALSE(error_of("experiment = ns-manufactured\nn_gamma = 22, 18\n").empty());
  CHECK_FALSE(error_of("experiment = ns-manufactured\nn_gamma = 21, 18, 18, 14\n").empty());
  CHECK_FALSE(error_of("experiment = poisson\nbasis = fourier\n").empty());
  CHECK_FALSE(error_of("experiment = poisson\ndegree_left = 3\n").empty());
  CHECK_FALSE(error_of("mesh = 4\n").empty()); // no experiment anywhere
  CHECK_THROWS_AS(parse_config("experiment = poisson\n", Experiment::cavity), ConfigError);
}

TEST_CASE("config files") {
  const auto path = std::filesystem::temp_directory_path() / "fdd_test_config.txt";
  {
    std::ofstream f(path);
    f << "experiment = infsup\nmesh = 20\nn_gamma = 1, 3\n";
  }
  const RunConfig c = load_config(path.string());
  CHECK(c.experiment == Experiment::infsup);
  CHECK(c.mesh == std::vector<int>{20});
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path.string()), ConfigError);
}

TEST_CASE("every experiment's defaults validate") {
  for (Experiment e : all_experiments()) {
    CAPTURE(experiment_name(e));
    CHECK_NOTHROW(RunConfig::defaults(e).validate());
  }
}

TEST_CASE("observed orders") {
  Report r;
  r.columns = {"experiment", "k", "h", "err", "status"};
  auto row = [](const char* k, double h, double e) {
    return std::vector<Cell>{std::string("x"), std::string(k), h, e, std::string("ok")};
  };
  r.rows = {row("a", 0.1, 1e-2), row("a", 0.05, 2.5e-3), row("b", 0.025, 1e-3), row("b", 0.0125, 5e-4)};
  add_observed_orders(r, {"k"}, "h", {"err"});
  CHECK(r.columns.back() == "status");
  CHECK(r.column("order_err") == 4);
  CHECK(std::holds_alternative<std::monostate>(r.at(0, "order_err")));
  CHECK(*r.number(1, "order_err") == doctest::Approx(2.0));
  // Key changes between rows 1 and 2: no order across the boundary.
  CHECK_FALSE(r.number(2, "order_err").has_value());
  CHECK(*r.number(3, "order_err") == doctest::Approx(1.0));
  CHECK_THROWS_AS(add_observed_orders(r, {"missing"}, "h", {"err"}), Error);
}

TEST_CASE("log-log slope") {
  const std::vector<double> h{0.1, 0.05, 0.025};
  CHECK(loglog_slope(h, {3e-2, 7.5e-3, 1.875e-3}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(loglog_slope({0.1}, {1.0}), Error);
  CHECK_THROWS_AS(loglog_slope({0.1, 0.05}, {1.0, 0.0}), Error);
}

TEST_CASE("cell formatting and CSV quoting") {
  CHECK(format_cell(Cell{}) == "");
  CHECK(format_cell(Cell{42LL}) == "42");
  CHECK(format_cell(Cell{0.1}) == "0.1");
  CHECK(format_cell(Cell{std::nan("")}) == "nan");
  Report r;
  r.columns = {"a", "b"};
  r.rows = {{std::string("x,y"), std::string("say \"hi\"")}};
  CHECK(csv(r) == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
}

TEST_CASE("a small Poisson study") {
  RunConfig c = parse_config("experiment = poisson\nmesh = 4, 8\nn_gamma = 3\nconforming = false\n");
  const Report a = run_study(c);
  const Report b = run_study(c);
  CHECK(csv(a) == csv(b));
  CHECK(a.columns.front() == "experiment");
  CHECK(a.columns.back() == "status");
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    CHECK(format_cell(a.at(i, "status")) == "ok");
  REQUIRE(a.column("error_h1") >= 0);
  REQUIRE(a.column("order_error_h1") >= 0);

  std::ostringstream js;
  a.write_json(js);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j["experiment"] == "poisson");
  CHECK(j["rows"].size() == a.rows.size());
  CHECK(j["config"]["mesh"] == "4, 8");
}

TEST_CASE("row failures land in the status column") {
  // N = 4 cannot carry 41 multipliers; the study records it and carries on.
  const Report r = run_study(parse_config("experiment = poisson\nmesh = 4, 8\nn_gamma = 41\nconforming = true\n"));
  bool failed = false;
  for (std::size_t i = 0; i < r.rows.size(); ++i)
    failed = failed || format_cell(r.at(i, "status")) != "ok";
  CHECK(failed);
}
