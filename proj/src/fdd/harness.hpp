// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fdd/fem.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fdd {

enum class Experiment { poisson, poisson_mixed, quadrature, infsup, condition, ns_manufactured, cavity, dump_lambda };

std::string experiment_name(Experiment e);
Experiment parse_experiment(std::string_view name);
const std::vector<Experiment>& all_experiments();

enum class MeshChoice { conforming, nonconforming, both };
enum class BasisChoice { orthonormal, raw, both };

/// One experiment. Config files are flat `key = value` lines:
///
///   # comment
///   experiment = poisson
///   mesh = 20, 28, 40      # N for the two-domain square, 1/h for the NS partition
///   n_gamma = 3, 13        # sweep values; NS experiments take one value per interface
///   degree_left = 2        # 1 | 2 | P1 | P2
///   degree_right = 2
///   quadrature = 4         # Gauss nodes per interface edge, list
///   conforming = both      # true | false | both
///   basis = orthonormal    # orthonormal | raw | both
///   full_scale = false
///   samples = 200          # dump-lambda points per interface
///   output = results.csv
///
/// Keys may appear once each; unknown keys are errors. Omitted keys take the
/// experiment's defaults.
struct RunConfig {
  Experiment experiment = Experiment::poisson;
  std::vector<int> mesh;
  std::vector<int> n_gamma;
  Degree degree_left = Degree::P2;
  Degree degree_right = Degree::P2;
  std::vector<int> quadrature{4};
  MeshChoice conforming = MeshChoice::both;
  BasisChoice basis = BasisChoice::orthonormal;
  bool full_scale = false;
  int samples = 200;
  std::string output;

  static RunConfig defaults(Experiment e);
  static const std::vector<std::string>& keys();

  /// Throws ConfigError on unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  void validate() const;
  std::string to_text() const;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// `experiment` overrides (or supplies) the experiment key of the text.
RunConfig parse_config(std::string_view text, std::optional<Experiment> experiment = std::nullopt);
RunConfig load_config(const std::string& path, std::optional<Experiment> experiment = std::nullopt);

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Report {
  Experiment experiment = Experiment::poisson;
  RunConfig config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  int column(std::string_view name) const; // -1 when absent
  const Cell& at(std::size_t row, std::string_view name) const;
  std::optional<double> number(std::size_t row, std::string_view name) const;

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

std::string format_cell(const Cell& c);

/// log(e1 / e2) / log(h1 / h2) for consecutive rows with equal `keys`; appends
/// an `order_<name>` column per error column, empty where undefined.
void add_observed_orders(Report& report, const std::vector<std::string>& keys, const std::string& h_column,
                         const std::vector<std::string>& error_columns);

/// Runs the study. Failures of single rows are recorded in the `status` column.
Report run_study(const RunConfig& config);

/// Least-squares slope of log(e) against log(h).
double loglog_slope(const std::vector<double>& h, const std::vector<double>& e);

} // namespace fdd
