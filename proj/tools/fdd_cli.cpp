// SPDX-License-Identifier: Apache-2.0
// Command-line driver over the C API.
#include "fdd/fdd.h"

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace {

struct Options {
  std::string config;
  std::string out;
  bool full_scale = false;
  bool json = false;
  std::vector<std::string> sets;
};

int report_error(const char* what, fdd_status st) {
  std::fprintf(stderr, "fdd: %s failed (status %d): %s\n", what, static_cast<int>(st), fdd_last_error());
  return st == FDD_ERR_CONFIG || st == FDD_ERR_INVALID_ARGUMENT ? 2 : 1;
}

int run(const std::string& experiment, const Options& opt) {
  fdd_config* raw = nullptr;
  fdd_status st = opt.config.empty() ? fdd_config_new(experiment.c_str(), &raw)
                                     : fdd_config_load(opt.config.c_str(), experiment.c_str(), &raw);
  if (st != FDD_OK)
    return report_error("reading the configuration", st);
  std::unique_ptr<fdd_config, decltype(&fdd_config_free)> cfg(raw, fdd_config_free);

  for (const auto& kv : opt.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "fdd: --set expects key=value, got '%s'\n", kv.c_str());
      return 2;
    }
    if ((st = fdd_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str())) != FDD_OK)
      return report_error("--set", st);
  }
  if (opt.full_scale && (st = fdd_config_set(cfg.get(), "full_scale", "true")) != FDD_OK)
    return report_error("--full-scale", st);

  std::string out = opt.out;
  if (out.empty()) {
    char buf[4096];
    size_t needed = 0;
    if ((st = fdd_config_get(cfg.get(), "output", buf, sizeof buf, &needed)) != FDD_OK)
      return report_error("reading the output path", st);
    out = buf;
  }

  fdd_report* rep_raw = nullptr;
  if ((st = fdd_run(cfg.get(), &rep_raw)) != FDD_OK)
    return report_error("run", st);
  std::unique_ptr<fdd_report, decltype(&fdd_report_free)> rep(rep_raw, fdd_report_free);

  const char* path = out.empty() ? nullptr : out.c_str();
  st = opt.json ? fdd_report_write_json(rep.get(), path) : fdd_report_write_csv(rep.get(), path);
  if (st != FDD_OK)
    return report_error("writing the report", st);

  // Non-zero exit when any row failed, so scripts notice.
  size_t status_col = fdd_report_columns(rep.get());
  for (size_t c = 0; c < fdd_report_columns(rep.get()); ++c)
    if (std::string(fdd_report_column_name(rep.get(), c)) == "status")
      status_col = c;
  int failed = 0;
  for (size_t r = 0; r < fdd_report_rows(rep.get()); ++r) {
    const char* text = nullptr;
    if (fdd_report_text(rep.get(), r, status_col, &text) == FDD_OK && std::string(text) != "ok") {
      std::fprintf(stderr, "fdd: row %zu: %s\n", r + 1, text);
      ++failed;
    }
  }
  return failed ? 3 : 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-conforming domain decomposition with Fourier interface multipliers"};
  app.set_version_flag("--version", std::string(fdd_version()));
  app.require_subcommand(1);

  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"poisson", "Poisson convergence on conforming and non-conforming meshes"},
      {"poisson-mixed", "Poisson with P1 on the left and P2 on the right"},
      {"quadrature", "Error against n_gamma for several interface quadrature rules"},
      {"infsup", "Inf-sup constant against n_gamma"},
      {"condition", "Condition number of the saddle system, raw and orthonormal bases"},
      {"ns-manufactured", "Navier-Stokes convergence for a manufactured solution"},
      {"cavity", "Lid-driven cavity at Re = 500, eddy centres"},
      {"dump-lambda", "Multiplier and interface derivatives at sample points"},
  };
  std::string chosen;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output file (default: stdout or the config's output key)");
    sub->add_flag("--full-scale", opt.full_scale, "add the h = 1/64 and 1/128 cavity rows");
    sub->add_flag("--json", opt.json, "write JSON instead of CSV");
    sub->add_option("--set", opt.sets, "override a config key, key=value (repeatable)");
    sub->callback([&chosen, n = name] { chosen = n; });
  }

  CLI11_PARSE(app, argc, argv);
  return run(chosen, opt);
}
