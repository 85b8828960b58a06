// SPDX-License-Identifier: Apache-2.0
#include "fdd/harness.hpp"

#include "fdd/infsup.hpp"
#include "fdd/navier_stokes.hpp"
#include "fdd/poisson.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace fdd {

namespace {

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names{
      {Experiment::poisson, "poisson"},
      {Experiment::poisson_mixed, "poisson-mixed"},
      {Experiment::quadrature, "quadrature"},
      {Experiment::infsup, "infsup"},
      {Experiment::condition, "condition"},
      {Experiment::ns_manufactured, "ns-manufactured"},
      {Experiment::cavity, "cavity"},
      {Experiment::dump_lambda, "dump-lambda"},
  };
  return names;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(std::string_view tok, std::string_view key) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ConfigError(std::string(key) + ": '" + std::string(tok) + "' is not an integer");
  return v;
}

// Comma or blank separated integers; `a:b:step` expands to a, a+step, ..., <= b.
std::vector<int> parse_int_list(std::string_view value, std::string_view key) {
  std::vector<int> out;
  std::string text(value);
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    const auto c1 = tok.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_int(tok, key));
      continue;
    }
    const auto c2 = tok.find(':', c1 + 1);
    const int a = parse_int(std::string_view(tok).substr(0, c1), key);
    const int b = parse_int(std::string_view(tok).substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1), key);
    const int step = c2 == std::string::npos ? 1 : parse_int(std::string_view(tok).substr(c2 + 1), key);
    if (step <= 0 || b < a)
      throw ConfigError(std::string(key) + ": bad range '" + tok + "'");
    for (int v = a; v <= b; v += step)
      out.push_back(v);
  }
  if (out.empty())
    throw ConfigError(std::string(key) + ": empty list");
  return out;
}

bool parse_bool(std::string_view v, std::string_view key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on")
    return true;
  if (v == "false" || v == "0" || v == "no" || v == "off")
    return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

Degree parse_degree(std::string_view v, std::string_view key) {
  if (v == "1" || v == "P1" || v == "p1")
    return Degree::P1;
  if (v == "2" || v == "P2" || v == "p2")
    return Degree::P2;
  throw ConfigError(std::string(key) + ": degree must be 1 or 2, got '" + std::string(v) + "'");
}

std::string join(const std::vector<int>& v, const char* sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

std::vector<int> odd_range(int a, int b) {
  std::vector<int> v;
  for (int i = a; i <= b; i += 2)
    v.push_back(i);
  return v;
}

bool is_poisson_family(Experiment e) {
  return e == Experiment::poisson || e == Experiment::poisson_mixed || e == Experiment::quadrature ||
         e == Experiment::infsup || e == Experiment::condition || e == Experiment::dump_lambda;
}

} // namespace

std::string experiment_name(Experiment e) {
  for (const auto& [k, n] : experiment_names())
    if (k == e)
      return n;
  throw Error("unknown experiment");
}

Experiment parse_experiment(std::string_view name) {
  for (const auto& [k, n] : experiment_names())
    if (n == name)
      return k;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& [k, n] : experiment_names())
      v.push_back(k);
    return v;
  }();
  return all;
}

RunConfig RunConfig::defaults(Experiment e) {
  RunConfig c;
  c.experiment = e;
  switch (e) {
  case Experiment::poisson:
    c.mesh = {20, 28, 40, 56, 80};
    c.n_gamma = {3, 13};
    break;
  case Experiment::poisson_mixed:
    c.mesh = {20, 28, 40, 56, 80};
    c.n_gamma = {13};
    c.degree_left = Degree::P1;
    c.conforming = MeshChoice::nonconforming;
    break;
  case Experiment::quadrature:
    c.mesh = {20, 28, 40};
    c.n_gamma = {5, 9, 13, 17, 21};
    c.quadrature = {2, 4};
    break;
  case Experiment::infsup:
    c.mesh = {20, 40, 80};
    c.n_gamma = odd_range(1, 45);
    c.conforming = MeshChoice::conforming;
    break;
  case Experiment::condition:
    c.mesh = {20};
    c.n_gamma = odd_range(1, 21);
    c.conforming = MeshChoice::conforming;
    c.basis = BasisChoice::both;
    break;
  case Experiment::ns_manufactured:
    c.mesh = {4, 8, 16};
    c.n_gamma = {22, 18, 18, 14};
    c.conforming = MeshChoice::nonconforming;
    break;
  case Experiment::cavity:
    c.mesh = {16, 32};
    c.n_gamma = {42, 18, 18, 14};
    c.conforming = MeshChoice::nonconforming;
    break;
  case Experiment::dump_lambda:
    c.mesh = {20};
    c.n_gamma = {1, 3, 5};
    c.conforming = MeshChoice::conforming;
    break;
  }
  return c;
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k{"experiment", "mesh",       "n_gamma", "degree_left", "degree_right", "quadrature",
                                          "conforming", "basis",      "full_scale", "samples",  "output"};
  return k;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "experiment")
    experiment = parse_experiment(value);
  else if (key == "mesh")
    mesh = parse_int_list(value, key);
  else if (key == "n_gamma")
    n_gamma = parse_int_list(value, key);
  else if (key == "degree_left")
    degree_left = parse_degree(value, key);
  else if (key == "degree_right")
    degree_right = parse_degree(value, key);
  else if (key == "quadrature")
    quadrature = parse_int_list(value, key);
  else if (key == "conforming") {
    if (value == "both")
      conforming = MeshChoice::both;
    else
      conforming = parse_bool(value, key) ? MeshChoice::conforming : MeshChoice::nonconforming;
  } else if (key == "basis") {
    if (value == "orthonormal")
      basis = BasisChoice::orthonormal;
    else if (value == "raw")
      basis = BasisChoice::raw;
    else if (value == "both")
      basis = BasisChoice::both;
    else
      throw ConfigError("basis: expected orthonormal, raw or both, got '" + std::string(value) + "'");
  } else if (key == "full_scale")
    full_scale = parse_bool(value, key);
  else if (key == "samples")
    samples = parse_int(value, key);
  else if (key == "output")
    output = std::string(value);
  else
    throw ConfigError("unknown key '" + std::string(key) + "'");
}

std::string RunConfig::get(std::string_view key) const {
  if (key == "experiment")
    return experiment_name(experiment);
  if (key == "mesh")
    return join(mesh);
  if (key == "n_gamma")
    return join(n_gamma);
  if (key == "degree_left")
    return std::to_string(static_cast<int>(degree_left));
  if (key == "degree_right")
    return std::to_string(static_cast<int>(degree_right));
  if (key == "quadrature")
    return join(quadrature);
  if (key == "conforming")
    return conforming == MeshChoice::both ? "both" : conforming == MeshChoice::conforming ? "true" : "false";
  if (key == "basis")
    return basis == BasisChoice::both ? "both" : basis == BasisChoice::raw ? "raw" : "orthonormal";
  if (key == "full_scale")
    return full_scale ? "true" : "false";
  if (key == "samples")
    return std::to_string(samples);
  if (key == "output")
    return output;
  throw ConfigError("unknown key '" + std::string(key) + "'");
}

void RunConfig::validate() const {
  if (mesh.empty() || n_gamma.empty() || quadrature.empty())
    throw ConfigError("mesh, n_gamma and quadrature lists must be non-empty");
  for (int q : quadrature)
    if (q < 1)
      throw ConfigError("quadrature node counts must be positive");
  for (int m : mesh)
    if (m <= 0)
      throw ConfigError("mesh values must be positive");
  if (is_poisson_family(experiment)) {
    for (int m : mesh)
      if (m % 2 != 0)
        throw ConfigError("two-domain mesh counts N must be even, got " + std::to_string(m));
    for (int g : n_gamma)
      if (g <= 0 || g % 2 == 0)
        throw ConfigError("n_gamma must be odd and positive, got " + std::to_string(g));
  } else {
    if (n_gamma.size() != default_ns_layout().interfaces.size())
      throw ConfigError("n_gamma needs one value per interface (" +
                        std::to_string(default_ns_layout().interfaces.size()) + ")");
    for (int g : n_gamma)
      if (g <= 0 || g % 4 != 2)
        throw ConfigError("NS n_gamma values must be 2 (2 n_omega + 1), got " + std::to_string(g));
    for (int m : mesh)
      if (m % 2 != 0)
        throw ConfigError("1/h must be even, got " + std::to_string(m));
    if (experiment == Experiment::cavity)
      for (int m : mesh)
        if (m != 16 && m != 32 && m != 64 && m != 128)
          throw ConfigError("cavity 1/h must be one of 16, 32, 64, 128");
  }
  if (samples < 2)
    throw ConfigError("samples must be at least 2");
}

std::string RunConfig::to_text() const {
  std::string s;
  for (const auto& k : keys())
    s += k + " = " + get(k) + "\n";
  return s;
}

RunConfig parse_config(std::string_view text, std::optional<Experiment> experiment) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::map<std::string, int> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto h = line.find('#'); h != std::string_view::npos)
      line = line.substr(0, h);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (std::find(RunConfig::keys().begin(), RunConfig::keys().end(), key) == RunConfig::keys().end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.emplace(key, line_no).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    entries.emplace_back(key, std::string(trim(line.substr(eq + 1))));
  }
  Experiment e = Experiment::poisson;
  bool have = false;
  for (const auto& [k, v] : entries)
    if (k == "experiment") {
      e = parse_experiment(v);
      have = true;
    }
  if (experiment) {
    if (have && e != *experiment)
      throw ConfigError("config is for experiment '" + experiment_name(e) + "', not '" +
                        experiment_name(*experiment) + "'");
    e = *experiment;
  } else if (!have)
    throw ConfigError("config does not name an experiment");
  RunConfig c = RunConfig::defaults(e);
  for (const auto& [k, v] : entries)
    if (k != "experiment") {
      try {
        c.set(k, v);
      } catch (const ConfigError& err) {
        throw ConfigError("line " + std::to_string(seen.at(k)) + ": " + err.what());
      }
    }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path, std::optional<Experiment> experiment) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), experiment);
}

// ---------------------------------------------------------------------------
// Report

int Report::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name)
      return static_cast<int>(i);
  return -1;
}

const Cell& Report::at(std::size_t row, std::string_view name) const {
  const int c = column(name);
  if (c < 0)
    throw Error("report has no column '" + std::string(name) + "'");
  return rows.at(row).at(c);
}

std::optional<double> Report::number(std::size_t row, std::string_view name) const {
  const Cell& c = at(row, name);
  if (const auto* d = std::get_if<double>(&c))
    return *d;
  if (const auto* i = std::get_if<long long>(&c))
    return static_cast<double>(*i);
  return std::nullopt;
}

std::string format_cell(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      if (std::isnan(v))
        return "nan";
      if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.12g", v);
      return buf;
    }
    std::string operator()(const std::string& s) const { return s; }
  } f;
  return std::visit(f, c);
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"')
      out += '"';
    out += ch;
  }
  return out + "\"";
}

} // namespace

void Report::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << csv_escape(columns[i]);
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << csv_escape(format_cell(row[i]));
    out << "\n";
  }
}

void Report::write_json(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment_name(experiment);
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& k : RunConfig::keys())
    cfg[k] = config.get(k);
  j["config"] = cfg;
  j["columns"] = columns;
  nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Cell& c = row[i];
      if (const auto* v = std::get_if<long long>(&c))
        r[columns[i]] = *v;
      else if (const auto* d = std::get_if<double>(&c))
        r[columns[i]] = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(format_cell(c));
      else if (const auto* s = std::get_if<std::string>(&c))
        r[columns[i]] = *s;
      else
        r[columns[i]] = nullptr;
    }
    rows_json.push_back(std::move(r));
  }
  j["rows"] = std::move(rows_json);
  out << j.dump(2) << "\n";
}

void add_observed_orders(Report& report, const std::vector<std::string>& keys, const std::string& h_column,
                         const std::vector<std::string>& error_columns) {
  std::vector<int> key_idx;
  for (const auto& k : keys) {
    key_idx.push_back(report.column(k));
    if (key_idx.back() < 0)
      throw Error("no key column '" + k + "'");
  }
  if (report.column(h_column) < 0)
    throw Error("no column '" + h_column + "'");
  for (const auto& e : error_columns) {
    const int ec = report.column(e);
    if (ec < 0)
      throw Error("no column '" + e + "'");
    // Keep a trailing status column last.
    const int status = report.column("status");
    const std::size_t at = status >= 0 ? static_cast<std::size_t>(status) : report.columns.size();
    report.columns.insert(report.columns.begin() + at, "order_" + e);
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
      Cell order;
      if (r > 0) {
        bool same = true;
        for (int k : key_idx)
          same = same && report.rows[r][k] == report.rows[r - 1][k];
        const auto h0 = report.number(r - 1, h_column), h1 = report.number(r, h_column);
        const auto e0 = report.number(r - 1, e), e1 = report.number(r, e);
        if (same && h0 && h1 && e0 && e1 && *h0 != *h1 && *e0 > 0.0 && *e1 > 0.0)
          order = std::log(*e0 / *e1) / std::log(*h0 / *h1);
      }
      report.rows[r].insert(report.rows[r].begin() + at, order);
    }
  }
}

double loglog_slope(const std::vector<double>& h, const std::vector<double>& e) {
  if (h.size() != e.size() || h.size() < 2)
    throw Error("slope needs at least two matching points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(e[i] > 0.0))
      throw Error("slope needs positive values");
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0)
    throw Error("slope needs distinct mesh sizes");
  return (n * sxy - sx * sy) / den;
}

// ---------------------------------------------------------------------------
// Studies

namespace {

using Row = std::vector<Cell>;

struct Table {
  Report report;

  explicit Table(const RunConfig& c, std::vector<std::string> columns) {
    report.experiment = c.experiment;
    report.config = c;
    report.columns = std::move(columns);
    report.columns.insert(report.columns.begin(), "experiment");
    report.columns.push_back("status");
  }

  // Fills the row by column name; cells not given stay empty.
  void add(const std::map<std::string, Cell>& cells, const std::string& status = "ok") {
    Row row(report.columns.size());
    row.front() = experiment_name(report.experiment);
    for (const auto& [name, value] : cells) {
      const int c = report.column(name);
      if (c < 0)
        throw Error("internal: no column " + name);
      row[c] = value;
    }
    row.back() = status;
    report.rows.push_back(std::move(row));
  }
};

std::vector<bool> mesh_choices(MeshChoice m) {
  if (m == MeshChoice::both)
    return {true, false};
  return {m == MeshChoice::conforming};
}

std::vector<bool> basis_choices(BasisChoice b) {
  if (b == BasisChoice::both)
    return {true, false};
  return {b == BasisChoice::orthonormal};
}

const char* mesh_label(bool conforming) { return conforming ? "conforming" : "nonconforming"; }
const char* basis_label(bool ortho) { return ortho ? "orthonormal" : "raw"; }

long long deg(Degree d) { return static_cast<int>(d); }

PoissonCase poisson_case(const RunConfig& c, int n, bool conforming, int n_gamma, int q, bool ortho) {
  PoissonCase pc;
  pc.n = n;
  pc.conforming = conforming;
  pc.degree_left = c.degree_left;
  pc.degree_right = c.degree_right;
  pc.n_gamma = n_gamma;
  pc.quadrature_nodes = q;
  pc.orthonormal = ortho;
  return pc;
}

std::map<std::string, Cell> poisson_keys(const RunConfig& c, bool conforming, int q, bool ortho) {
  return {{"mesh", std::string(mesh_label(conforming))},
          {"degree_left", deg(c.degree_left)},
          {"degree_right", deg(c.degree_right)},
          {"q", static_cast<long long>(q)},
          {"basis", std::string(basis_label(ortho))}};
}

Report poisson_study(const RunConfig& c) {
  Table t(c, {"mesh", "degree_left", "degree_right", "q", "basis", "n_gamma", "N", "h", "primal_dofs", "multipliers",
              "error_h1", "error_omega1", "error_omega2", "residual"});
  // Quadrature curves run over n_gamma at fixed mesh, convergence studies over the mesh.
  const bool gamma_inner = c.experiment == Experiment::quadrature;
  const std::size_t outer = gamma_inner ? c.mesh.size() : c.n_gamma.size();
  const std::size_t inner = gamma_inner ? c.n_gamma.size() : c.mesh.size();
  for (bool conforming : mesh_choices(c.conforming))
    for (bool ortho : basis_choices(c.basis))
      for (int q : c.quadrature)
        for (std::size_t a = 0; a < outer; ++a)
          for (std::size_t b = 0; b < inner; ++b) {
            const int n = gamma_inner ? c.mesh[a] : c.mesh[b];
            const int g = gamma_inner ? c.n_gamma[b] : c.n_gamma[a];
            auto cells = poisson_keys(c, conforming, q, ortho);
            cells["n_gamma"] = static_cast<long long>(g);
            cells["N"] = static_cast<long long>(n);
            cells["h"] = 1.0 / n;
            try {
              const PoissonResult r = solve_poisson(poisson_case(c, n, conforming, g, q, ortho));
              cells["primal_dofs"] = static_cast<long long>(r.system.primal_size);
              cells["multipliers"] = static_cast<long long>(r.system.multiplier_size);
              cells["error_h1"] = r.broken_h1;
              cells["error_omega1"] = r.subdomain_h1[0];
              cells["error_omega2"] = r.subdomain_h1[1];
              cells["residual"] = r.solution.residual;
              t.add(cells);
            } catch (const std::exception& e) {
              t.add(cells, e.what());
            }
          }
  // Single-domain baseline on the conforming square mesh.
  if (c.experiment == Experiment::poisson && c.degree_left == c.degree_right)
    for (int n : c.mesh) {
      std::map<std::string, Cell> cells{{"mesh", std::string("reference")},
                                        {"degree_left", deg(c.degree_left)},
                                        {"degree_right", deg(c.degree_right)},
                                        {"N", static_cast<long long>(n)},
                                        {"h", 1.0 / n},
                                        {"multipliers", 0LL}};
      try {
        const double e = poisson_reference_error(n, c.degree_left);
        cells["error_h1"] = e;
        t.add(cells);
      } catch (const std::exception& ex) {
        t.add(cells, ex.what());
      }
    }
  add_observed_orders(t.report, {"mesh", "degree_left", "degree_right", "q", "basis", "n_gamma"}, "h",
                      {"error_h1", "error_omega1", "error_omega2"});
  return t.report;
}

Report infsup_study(const RunConfig& c) {
  Table t(c, {"mesh", "degree_left", "degree_right", "q", "basis", "N", "h", "n_gamma", "trace_dofs", "beta"});
  for (bool conforming : mesh_choices(c.conforming))
    for (bool ortho : basis_choices(c.basis))
      for (int q : c.quadrature)
        for (int n : c.mesh)
          for (int g : c.n_gamma) {
            auto cells = poisson_keys(c, conforming, q, ortho);
            cells["N"] = static_cast<long long>(n);
            cells["h"] = 1.0 / n;
            cells["n_gamma"] = static_cast<long long>(g);
            try {
              const PoissonProblem p = make_poisson_problem(poisson_case(c, n, conforming, g, q, ortho));
              const InfSupProblem s = build_surrogate(p.graph, 0);
              cells["trace_dofs"] = static_cast<long long>(s.x_x.rows());
              cells["beta"] = beta_estimate(s);
              t.add(cells);
            } catch (const std::exception& e) {
              t.add(cells, e.what());
            }
          }
  return t.report;
}

Report condition_study(const RunConfig& c) {
  Table t(c, {"mesh", "degree_left", "degree_right", "q", "basis", "N", "h", "n_gamma", "size", "condition", "method"});
  for (bool conforming : mesh_choices(c.conforming))
    for (bool ortho : basis_choices(c.basis))
      for (int q : c.quadrature)
        for (int n : c.mesh)
          for (int g : c.n_gamma) {
            auto cells = poisson_keys(c, conforming, q, ortho);
            cells["N"] = static_cast<long long>(n);
            cells["h"] = 1.0 / n;
            cells["n_gamma"] = static_cast<long long>(g);
            try {
              const PoissonProblem p = make_poisson_problem(poisson_case(c, n, conforming, g, q, ortho));
              const SaddleSystem sys = build_saddle(p.graph);
              cells["size"] = static_cast<long long>(sys.size());
              cells["condition"] = condition_estimate(sys);
              cells["method"] = std::string(sys.size() <= 2000 ? "exact" : "hager-higham");
              t.add(cells);
            } catch (const std::exception& e) {
              t.add(cells, e.what());
            }
          }
  return t.report;
}

Report dump_lambda_study(const RunConfig& c) {
  Table t(c, {"mesh", "degree_left", "degree_right", "q", "basis", "N", "n_gamma", "s", "y", "lambda", "dudx_omega1",
              "dudx_omega2"});
  for (bool conforming : mesh_choices(c.conforming))
    for (bool ortho : basis_choices(c.basis))
      for (int q : c.quadrature)
        for (int n : c.mesh)
          for (int g : c.n_gamma) {
            auto base = poisson_keys(c, conforming, q, ortho);
            base["N"] = static_cast<long long>(n);
            base["n_gamma"] = static_cast<long long>(g);
            try {
              const PoissonResult r = solve_poisson(poisson_case(c, n, conforming, g, q, ortho));
              const auto& spec = r.problem.graph.interfaces[0];
              const Segment& seg = r.problem.interface;
              std::vector<double> xi(spec.basis.size());
              for (int k = 0; k < c.samples; ++k) {
                const double s = seg.length() * k / (c.samples - 1);
                const Point p = seg.at(s);
                spec.basis.eval_all(s, xi);
                double lam = 0.0;
                for (int i = 0; i < spec.basis.size(); ++i)
                  lam += r.solution.lambda[0][i] * xi[i];
                auto cells = base;
                cells["s"] = s;
                cells["y"] = p.y;
                cells["lambda"] = lam;
                for (int side = 0; side < 2; ++side) {
                  const FunctionSpace& space = *r.problem.spaces[side];
                  const auto loc = space.mesh().locate(p);
                  if (!loc)
                    throw Error("interface point outside subdomain mesh");
                  cells[side == 0 ? "dudx_omega1" : "dudx_omega2"] = space.gradient(r.solution.u[side], *loc)[0];
                }
                t.add(cells);
              }
            } catch (const std::exception& e) {
              t.add(base, e.what());
            }
          }
  return t.report;
}

std::string gamma_label(const std::vector<int>& g) { return join(g, " "); }

Report ns_study(const RunConfig& c) {
  Table t(c, {"h_inv", "h", "n_gamma", "velocity_dofs", "pressure_dofs", "multipliers", "system_size",
              "newton_iterations", "residual", "velocity_h1", "pressure_l2", "combined", "jump"});
  for (int n : c.mesh) {
    std::map<std::string, Cell> cells{
        {"h_inv", static_cast<long long>(n)}, {"h", 1.0 / n}, {"n_gamma", gamma_label(c.n_gamma)}};
    try {
      NsDiscretization d(manufactured_case(MeshSize{n}, c.n_gamma));
      const NsSolution sol = newton_solve(d);
      const NsErrors e = manufactured_errors(d, sol);
      cells["velocity_dofs"] = static_cast<long long>(d.velocity_dofs());
      cells["pressure_dofs"] = static_cast<long long>(d.pressure_dofs());
      cells["multipliers"] = static_cast<long long>(d.multiplier_dofs());
      cells["system_size"] = static_cast<long long>(sol.system_size);
      cells["newton_iterations"] = static_cast<long long>(sol.log.iterations);
      cells["residual"] = sol.log.residuals.back();
      cells["velocity_h1"] = e.velocity_h1;
      cells["pressure_l2"] = e.pressure_l2;
      cells["combined"] = e.combined();
      cells["jump"] = sol.jump;
      t.add(cells);
    } catch (const std::exception& ex) {
      t.add(cells, ex.what());
    }
  }
  add_observed_orders(t.report, {"n_gamma"}, "h", {"velocity_h1", "pressure_l2", "combined"});
  return t.report;
}

Report cavity_study(const RunConfig& c) {
  std::vector<std::string> cols{"h_inv",       "h",           "n_gamma",           "reynolds",
                                "velocity_dofs", "pressure_dofs", "multipliers", "system_size",
                                "newton_iterations", "residual"};
  for (const auto& b : cavity_eddy_boxes())
    for (const char* suffix : {"_x", "_y", "_speed", "_error"})
      cols.push_back(b.label + suffix);
  Table t(c, cols);
  std::vector<int> meshes = c.mesh;
  if (c.full_scale)
    for (int extra : {64, 128})
      if (std::find(meshes.begin(), meshes.end(), extra) == meshes.end())
        meshes.push_back(extra);
  for (int n : meshes) {
    std::map<std::string, Cell> cells{
        {"h_inv", static_cast<long long>(n)}, {"h", 1.0 / n}, {"n_gamma", gamma_label(c.n_gamma)}};
    try {
      NsProblem p = cavity_case(MeshSize{n});
      p.n_gamma = c.n_gamma;
      NsDiscretization d(p);
      const NsSolution sol = newton_solve(d);
      cells["reynolds"] = p.reynolds();
      cells["velocity_dofs"] = static_cast<long long>(d.velocity_dofs());
      cells["pressure_dofs"] = static_cast<long long>(d.pressure_dofs());
      cells["multipliers"] = static_cast<long long>(d.multiplier_dofs());
      cells["system_size"] = static_cast<long long>(sol.system_size);
      cells["newton_iterations"] = static_cast<long long>(sol.log.iterations);
      cells["residual"] = sol.log.residuals.back();
      const auto eddies =
          find_eddies([&](Point q) { return evaluate_velocity(d, sol, q); }, cavity_eddy_boxes());
      const auto& ref = cavity_reference_centers();
      for (std::size_t i = 0; i < eddies.size(); ++i) {
        const auto& e = eddies[i];
        cells[e.label + "_x"] = e.center.x;
        cells[e.label + "_y"] = e.center.y;
        cells[e.label + "_speed"] = e.speed;
        cells[e.label + "_error"] = norm(e.center - ref.at(i).second);
      }
      std::string status = "ok";
      for (const auto& e : eddies)
        if (e.on_boundary)
          status = "eddy " + e.label + " on search box boundary";
      t.add(cells, status);
    } catch (const std::exception& ex) {
      t.add(cells, ex.what());
    }
  }
  return t.report;
}

} // namespace

Report run_study(const RunConfig& config) {
  config.validate();
  switch (config.experiment) {
  case Experiment::poisson:
  case Experiment::poisson_mixed:
  case Experiment::quadrature:
    return poisson_study(config);
  case Experiment::infsup:
    return infsup_study(config);
  case Experiment::condition:
    return condition_study(config);
  case Experiment::ns_manufactured:
    return ns_study(config);
  case Experiment::cavity:
    return cavity_study(config);
  case Experiment::dump_lambda:
    return dump_lambda_study(config);
  }
  throw Error("unknown experiment");
}

} // namespace fdd
