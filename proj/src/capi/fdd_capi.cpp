// SPDX-License-Identifier: Apache-2.0
#include "fdd/fdd.h"

#include "fdd/harness.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>
#include <new>
#include <optional>
#include <string>

struct fdd_config {
  fdd::RunConfig config;
};

struct fdd_report {
  fdd::Report report;
};

namespace {

thread_local std::string last_error;
thread_local std::string text_buffer;

fdd_status fail(fdd_status code, const std::string& msg) {
  last_error = msg;
  return code;
}

// Maps exceptions escaping the core onto status codes.
template <class F>
fdd_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const fdd::ConfigError& e) {
    return fail(FDD_ERR_CONFIG, e.what());
  } catch (const fdd::Error& e) {
    return fail(FDD_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FDD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FDD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FDD_ERR_INTERNAL, "unknown error");
  }
}

std::optional<fdd::Experiment> experiment_arg(const char* name) {
  if (!name)
    return std::nullopt;
  return fdd::parse_experiment(name);
}

template <class Write>
fdd_status write_to(const char* path, Write&& write) {
  if (!path || std::strcmp(path, "-") == 0) {
    write(std::cout);
    std::cout.flush();
    return std::cout ? FDD_OK : fail(FDD_ERR_IO, "write to stdout failed");
  }
  std::ofstream out(path);
  if (!out)
    return fail(FDD_ERR_IO, std::string("cannot open '") + path + "' for writing");
  write(out);
  out.close();
  return out ? FDD_OK : fail(FDD_ERR_IO, std::string("write to '") + path + "' failed");
}

bool valid_cell(const fdd_report* r, size_t row, size_t col) {
  return r && row < r->report.rows.size() && col < r->report.columns.size();
}

} // namespace

extern "C" {

const char* fdd_version(void) { return FDD_VERSION_STRING; }

const char* fdd_last_error(void) { return last_error.c_str(); }

fdd_status fdd_config_new(const char* experiment, fdd_config** out) {
  if (!experiment || !out)
    return fail(FDD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new fdd_config{fdd::RunConfig::defaults(fdd::parse_experiment(experiment))};
    return FDD_OK;
  });
}

fdd_status fdd_config_parse(const char* text, const char* experiment, fdd_config** out) {
  if (!text || !out)
    return fail(FDD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new fdd_config{fdd::parse_config(text, experiment_arg(experiment))};
    return FDD_OK;
  });
}

fdd_status fdd_config_load(const char* path, const char* experiment, fdd_config** out) {
  if (!path || !out)
    return fail(FDD_ERR_INVALID_ARGUMENT, "null argument");
  {
    std::ifstream probe(path);
    if (!probe)
      return fail(FDD_ERR_IO, std::string("cannot read config file '") + path + "'");
  }
  return guarded([&] {
    *out = new fdd_config{fdd::load_config(path, experiment_arg(experiment))};
    return FDD_OK;
  });
}

fdd_status fdd_config_set(fdd_config* config, const char* key, const char* value) {
  if (!config || !key || !value)
    return fail(FDD_ERR_INVALID_ARGUMENT, "null argument");
  const auto& keys = fdd::RunConfig::keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    return fail(FDD_ERR_INVALID_ARGUMENT, std::string("unknown key '") + key + "'");
  return guarded([&] {
    // The experiment key resets the remaining keys to that experiment's defaults.
    if (std::strcmp(key, "experiment") == 0) {
      fdd::RunConfig fresh = fdd::RunConfig::defaults(fdd::parse_experiment(value));
      fresh.output = config->config.output;
      config->config = fresh;
    } else {
      fdd::RunConfig next = config->config;
      next.set(key, value);
      config->config = next;
    }
    return FDD_OK;
  });
}

fdd_status fdd_config_get(const fdd_config* config, const char* key, char* buf, size_t capacity, size_t* needed) {
  if (!config || !key || (!buf && capacity > 0))
    return fail(FDD_ERR_INVALID_ARGUMENT, "null argument");
  const auto& keys = fdd::RunConfig::keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    return fail(FDD_ERR_INVALID_ARGUMENT, std::string("unknown key '") + key + "'");
  return guarded([&] {
    const std::string v = config->config.get(key);
    if (needed)
      *needed = v.size();
    if (capacity > 0) {
      const size_t n = std::min(capacity - 1, v.size());
      std::memcpy(buf, v.data(), n);
      buf[n] = '\0';
    }
    return FDD_OK;
  });
}

void fdd_config_free(fdd_config* config) { delete config; }

fdd_status fdd_run(const fdd_config* config, fdd_report** out) {
  if (!config || !out)
    return fail(FDD_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new fdd_report{fdd::run_study(config->config)};
    return FDD_OK;
  });
}

size_t fdd_report_rows(const fdd_report* report) { return report ? report->report.rows.size() : 0; }

size_t fdd_report_columns(const fdd_report* report) { return report ? report->report.columns.size() : 0; }

const char* fdd_report_column_name(const fdd_report* report, size_t column) {
  if (!report || column >= report->report.columns.size())
    return nullptr;
  return report->report.columns[column].c_str();
}

fdd_status fdd_report_number(const fdd_report* report, size_t row, size_t column, double* value) {
  if (!value || !valid_cell(report, row, column))
    return fail(FDD_ERR_INVALID_ARGUMENT, "bad report handle or index");
  const auto& cell = report->report.rows[row][column];
  if (const auto* d = std::get_if<double>(&cell))
    *value = *d;
  else if (const auto* i = std::get_if<long long>(&cell))
    *value = static_cast<double>(*i);
  else
    return fail(FDD_ERR_NOT_NUMBER, "cell is not a number");
  return FDD_OK;
}

fdd_status fdd_report_text(const fdd_report* report, size_t row, size_t column, const char** text) {
  if (!text || !valid_cell(report, row, column))
    return fail(FDD_ERR_INVALID_ARGUMENT, "bad report handle or index");
  text_buffer = fdd::format_cell(report->report.rows[row][column]);
  *text = text_buffer.c_str();
  return FDD_OK;
}

fdd_status fdd_report_write_csv(const fdd_report* report, const char* path) {
  if (!report)
    return fail(FDD_ERR_INVALID_ARGUMENT, "null report");
  return guarded([&] { return write_to(path, [&](std::ostream& o) { report->report.write_csv(o); }); });
}

fdd_status fdd_report_write_json(const fdd_report* report, const char* path) {
  if (!report)
    return fail(FDD_ERR_INVALID_ARGUMENT, "null report");
  return guarded([&] { return write_to(path, [&](std::ostream& o) { report->report.write_json(o); }); });
}

void fdd_report_free(fdd_report* report) { delete report; }

} // extern "C"
