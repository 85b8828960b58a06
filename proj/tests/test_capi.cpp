// SPDX-License-Identifier: Apache-2.0
// Exercises the shared library through its C header only.
#include "fdd/fdd.h"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string get(const fdd_config* c, const char* key) {
  size_t needed = 0;
  REQUIRE(fdd_config_get(c, key, nullptr, 0, &needed) == FDD_OK);
  std::string buf(needed + 1, '\0');
  REQUIRE(fdd_config_get(c, key, buf.data(), buf.size(), &needed) == FDD_OK);
  buf.resize(needed);
  return buf;
}

std::string slurp(const char* path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("version and error state") {
  CHECK(std::strlen(fdd_version()) > 0);
  fdd_config* c = nullptr;
  CHECK(fdd_config_new("no-such-experiment", &c) == FDD_ERR_CONFIG);
  CHECK(c == nullptr);
  CHECK(std::string(fdd_last_error()).find("no-such-experiment") != std::string::npos);
  REQUIRE(fdd_config_new("infsup", &c) == FDD_OK);
  CHECK(std::string(fdd_last_error()).empty());
  fdd_config_free(c);
}

TEST_CASE("null arguments are rejected, frees accept null") {
  fdd_config* c = nullptr;
  CHECK(fdd_config_new(nullptr, &c) == FDD_ERR_INVALID_ARGUMENT);
  CHECK(fdd_config_new("poisson", nullptr) == FDD_ERR_INVALID_ARGUMENT);
  CHECK(fdd_config_parse(nullptr, nullptr, &c) == FDD_ERR_INVALID_ARGUMENT);
  CHECK(fdd_config_set(nullptr, "mesh", "4") == FDD_ERR_INVALID_ARGUMENT);
  CHECK(fdd_run(nullptr, nullptr) == FDD_ERR_INVALID_ARGUMENT);
  CHECK(fdd_report_rows(nullptr) == 0);
  CHECK(fdd_report_column_name(nullptr, 0) == nullptr);
  CHECK(fdd_report_write_csv(nullptr, nullptr) == FDD_ERR_INVALID_ARGUMENT);
  fdd_config_free(nullptr);
  fdd_report_free(nullptr);
}

TEST_CASE("config keys") {
  fdd_config* c = nullptr;
  REQUIRE(fdd_config_new("poisson", &c) == FDD_OK);
  CHECK(get(c, "experiment") == "poisson");
  CHECK(fdd_config_set(c, "mesh", "4, 8") == FDD_OK);
  CHECK(get(c, "mesh") == "4, 8");
  CHECK(fdd_config_set(c, "nope", "1") == FDD_ERR_INVALID_ARGUMENT);
  CHECK(fdd_config_set(c, "samples", "many") == FDD_ERR_CONFIG);
  CHECK(get(c, "samples") == "200"); // failed set leaves the value alone

  // Truncation keeps the terminator and reports the full length.
  char small[3];
  size_t needed = 0;
  CHECK(fdd_config_get(c, "experiment", small, sizeof small, &needed) == FDD_OK);
  CHECK(needed == 7);
  CHECK(std::string(small) == "po");

  // Switching experiment resets to that experiment's defaults.
  CHECK(fdd_config_set(c, "experiment", "cavity") == FDD_OK);
  CHECK(get(c, "n_gamma") == "42, 18, 18, 14");
  fdd_config_free(c);
}

TEST_CASE("parse and load") {
  fdd_config* c = nullptr;
  CHECK(fdd_config_parse("experiment = infsup\nmesh = 20\n", nullptr, &c) == FDD_OK);
  fdd_config_free(c);
  c = nullptr;
  CHECK(fdd_config_parse("mesh = 20\nwat = 1\n", "infsup", &c) == FDD_ERR_CONFIG);
  CHECK(std::string(fdd_last_error()).find("line 2") != std::string::npos);
  CHECK(fdd_config_load("/nonexistent/fdd.cfg", "infsup", &c) == FDD_ERR_IO);

  const char* path = "capi_test.cfg";
  {
    std::ofstream f(path);
    f << "experiment = condition\nmesh = 4\nn_gamma = 1, 3\n";
  }
  REQUIRE(fdd_config_load(path, nullptr, &c) == FDD_OK);
  CHECK(get(c, "n_gamma") == "1, 3");
  fdd_config_free(c);
  std::remove(path);
}

TEST_CASE("run and read a report") {
  fdd_config* c = nullptr;
  REQUIRE(fdd_config_parse("experiment = infsup\nmesh = 8\nn_gamma = 1, 3, 5\n", nullptr, &c) == FDD_OK);
  fdd_report* r = nullptr;
  REQUIRE(fdd_run(c, &r) == FDD_OK);
  REQUIRE(fdd_report_rows(r) == 3);

  long beta = -1, status = -1, gamma = -1;
  for (size_t k = 0; k < fdd_report_columns(r); ++k) {
    const std::string name = fdd_report_column_name(r, k);
    if (name == "beta")
      beta = static_cast<long>(k);
    if (name == "status")
      status = static_cast<long>(k);
    if (name == "n_gamma")
      gamma = static_cast<long>(k);
  }
  REQUIRE(beta >= 0);
  REQUIRE(status >= 0);
  REQUIRE(gamma >= 0);
  double b = 0.0, g = 0.0;
  CHECK(fdd_report_number(r, 0, beta, &b) == FDD_OK);
  CHECK(b == doctest::Approx(1.4142135623730951));
  CHECK(fdd_report_number(r, 2, gamma, &g) == FDD_OK);
  CHECK(g == 5.0);
  CHECK(fdd_report_number(r, 0, status, &b) == FDD_ERR_NOT_NUMBER);
  CHECK(fdd_report_number(r, 99, beta, &b) == FDD_ERR_INVALID_ARGUMENT);
  const char* text = nullptr;
  CHECK(fdd_report_text(r, 1, status, &text) == FDD_OK);
  CHECK(std::string(text) == "ok");
  CHECK(fdd_report_column_name(r, 999) == nullptr);

  CHECK(fdd_report_write_csv(r, "capi_test.csv") == FDD_OK);
  const std::string csv = slurp("capi_test.csv");
  CHECK(csv.rfind("experiment,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(fdd_report_write_json(r, "capi_test.json") == FDD_OK);
  CHECK(slurp("capi_test.json").find("\"rows\"") != std::string::npos);
  CHECK(fdd_report_write_csv(r, "/nonexistent/dir/x.csv") == FDD_ERR_IO);
  std::remove("capi_test.csv");
  std::remove("capi_test.json");

  fdd_report_free(r);
  fdd_config_free(c);
}

TEST_CASE("invalid configs fail the run") {
  fdd_config* c = nullptr;
  REQUIRE(fdd_config_new("poisson", &c) == FDD_OK);
  REQUIRE(fdd_config_set(c, "n_gamma", "4") == FDD_OK); // parsed, not yet validated
  fdd_report* r = nullptr;
  CHECK(fdd_run(c, &r) == FDD_ERR_CONFIG);
  CHECK(r == nullptr);
  fdd_config_free(c);
}
