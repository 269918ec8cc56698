#include "chemo/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace chemo {

ConfigError::ConfigError(std::vector<std::string> v)
    : std::invalid_argument([&] {
        std::string msg = "invalid configuration:";
        for (const auto& s : v) msg += "\n  " + s;
        return msg;
      }()),
      violations(std::move(v)) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"d", "n"}},
      {"params", {"eps", "lambda", "N", "T", "eta", "c3"}},
      {"beta", {"family", "m", "c1", "c2"}},
      {"pi", {"family"}},
      {"initial", {"preset", "value", "amplitude", "k", "path", "smooth"}},
      {"source", {"preset", "amplitude", "k", "path"}},
      {"solver", {"lin_tol", "newton_tol", "max_newton", "tau_schedule"}},
      {"output", {"directory", "stride"}},
      {"study", {"h_levels", "lambda_levels", "eps_levels"}},
  };
  return keys;
}

class Reader {
 public:
  std::vector<std::string> errors;

  void read(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      line = trim(line);
      if (line.empty() || line[0] == '#' || line[0] == ';') continue;
      const std::string where = "line " + std::to_string(lineno) + ": ";
      if (line.front() == '[') {
        if (line.back() != ']') {
          errors.push_back(where + "malformed section header '" + line + "'");
          continue;
        }
        section = trim(line.substr(1, line.size() - 2));
        if (!known_keys().count(section))
          errors.push_back(where + "unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        errors.push_back(where + "expected 'key = value', got '" + line + "'");
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (section.empty()) {
        errors.push_back(where + "key '" + key + "' outside any section");
        continue;
      }
      const auto sec = known_keys().find(section);
      if (sec == known_keys().end()) continue;  // already reported
      if (!sec->second.count(key)) {
        errors.push_back(where + "unknown key '" + key + "' in [" + section + "]");
        continue;
      }
      const std::string full = section + "." + key;
      if (values_.count(full))
        errors.push_back(where + "duplicate key " + full);
      values_[full] = value;
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  void get(const std::string& key, double& out) {
    if (!has(key)) return;
    const std::string& s = values_.at(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v))
      errors.push_back(key + ": expected a finite number, got '" + s + "'");
    else
      out = v;
  }

  void get(const std::string& key, int& out) {
    if (!has(key)) return;
    const std::string& s = values_.at(key);
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0')
      errors.push_back(key + ": expected an integer, got '" + s + "'");
    else
      out = static_cast<int>(v);
  }

  void get(const std::string& key, std::string& out) {
    if (has(key)) out = values_.at(key);
  }

  void get(const std::string& key, bool& out) {
    if (!has(key)) return;
    const std::string& s = values_.at(key);
    if (s == "true" || s == "1" || s == "yes") out = true;
    else if (s == "false" || s == "0" || s == "no") out = false;
    else errors.push_back(key + ": expected true or false, got '" + s + "'");
  }

  void get(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    out.clear();
    for (const auto& item : split_list(values_.at(key))) {
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (*end != '\0' || !std::isfinite(v)) {
        errors.push_back(key + ": bad list entry '" + item + "'");
        return;
      }
      out.push_back(v);
    }
  }

  void get(const std::string& key, std::vector<int>& out) {
    std::vector<double> tmp;
    if (!has(key)) return;
    get(key, tmp);
    out.clear();
    for (double v : tmp) {
      if (v != std::floor(v)) {
        errors.push_back(key + ": expected integers");
        return;
      }
      out.push_back(static_cast<int>(v));
    }
  }

 private:
  std::map<std::string, std::string> values_;
};

void check_levels(const std::string& name, const std::vector<double>& v,
                  std::vector<std::string>& errors) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) {
      errors.push_back("study." + name + " must be strictly decreasing");
      return;
    }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  Reader r;
  r.read(text);
  ScenarioConfig c;

  r.get("grid.d", c.d);
  r.get("grid.n", c.n);
  r.get("params.eps", c.params.eps);
  r.get("params.lambda", c.params.lambda);
  r.get("params.N", c.params.N);
  r.get("params.T", c.params.T);
  r.get("params.eta", c.params.eta);
  r.get("params.c3", c.params.c3);

  std::string family = to_string(c.beta.family);
  r.get("beta.family", family);
  try {
    const BetaFamily f = beta_family_from_string(family);
    double m = 3.0;
    r.get("beta.m", m);
    switch (f) {
      case BetaFamily::linear: c.beta = linear_beta(); break;
      case BetaFamily::power: c.beta = power_beta(m); break;
      case BetaFamily::logit: c.beta = logit_beta(); break;
      case BetaFamily::abs_logit: c.beta = abs_logit_beta(); break;
    }
    if (f == BetaFamily::power && !(m >= 3.0))
      r.errors.push_back("beta.m must be >= 3 for the power family");
  } catch (const std::invalid_argument& e) {
    r.errors.push_back(std::string("beta.family: ") + e.what());
  }
  r.get("beta.c1", c.beta.c1);
  r.get("beta.c2", c.beta.c2);
  if (!(c.beta.c1 > 0.0)) r.errors.push_back("beta.c1 must be positive");
  if (c.beta.c2 < 0.0) r.errors.push_back("beta.c2 must be nonnegative");

  std::string pi_family = "zero";
  r.get("pi.family", pi_family);
  try {
    c.pi.family = pi_family_from_string(pi_family);
  } catch (const std::invalid_argument& e) {
    r.errors.push_back(std::string("pi.family: ") + e.what());
  }
  c.pi.c3 = c.params.c3;
  if (c.pi.family == PiFamily::tanh_decay && !(c.params.c3 > 0.0))
    r.errors.push_back("pi.family = tanh_decay requires params.c3 > 0");

  r.get("initial.preset", c.initial_preset);
  r.get("initial.value", c.initial_value);
  r.get("initial.amplitude", c.initial_amplitude);
  r.get("initial.k", c.initial_k);
  r.get("initial.path", c.initial_path);
  r.get("initial.smooth", c.smooth_initial);
  if (c.initial_preset != "constant" && c.initial_preset != "cosine" &&
      c.initial_preset != "bump" && c.initial_preset != "csv")
    r.errors.push_back("initial.preset must be constant, cosine, bump or csv");
  if (c.initial_preset == "csv" && c.initial_path.empty())
    r.errors.push_back("initial.preset = csv requires initial.path");

  r.get("source.preset", c.source_preset);
  r.get("source.amplitude", c.source_amplitude);
  r.get("source.k", c.source_k);
  r.get("source.path", c.source_path);
  if (c.source_preset != "zero" && c.source_preset != "cosine_g" &&
      c.source_preset != "csv")
    r.errors.push_back("source.preset must be zero, cosine_g or csv");
  if (c.source_preset == "cosine_g" && c.source_k < 1)
    r.errors.push_back("source.k must be >= 1 (g must have zero mean)");
  if (c.source_preset == "csv" && c.source_path.empty())
    r.errors.push_back("source.preset = csv requires source.path");

  r.get("solver.lin_tol", c.solver.lin_tol);
  r.get("solver.newton_tol", c.solver.newton_tol);
  r.get("solver.max_newton", c.solver.max_newton);
  r.get("solver.tau_schedule", c.solver.tau_factors);
  try {
    c.solver.validate();
  } catch (const std::invalid_argument& e) {
    r.errors.push_back(std::string("solver: ") + e.what());
  }

  r.get("output.directory", c.output_directory);
  r.get("output.stride", c.snapshot_stride);
  if (c.snapshot_stride < 1) r.errors.push_back("output.stride must be >= 1");

  r.get("study.h_levels", c.h_levels);
  r.get("study.lambda_levels", c.lambda_levels);
  r.get("study.eps_levels", c.eps_levels);
  for (std::size_t k = 1; k < c.h_levels.size(); ++k)
    if (!(c.h_levels[k] > c.h_levels[k - 1]))
      r.errors.push_back("study.h_levels (step counts) must be strictly increasing");
  check_levels("lambda_levels", c.lambda_levels, r.errors);
  check_levels("eps_levels", c.eps_levels, r.errors);

  if (c.d != 1 && c.d != 2)
    r.errors.push_back("grid.d must be 1 or 2 (got " + std::to_string(c.d) + ")");
  if (c.n < 4) r.errors.push_back("grid.n must be >= 4");
  for (const auto& v : c.params.violations()) r.errors.push_back("params: " + v);

  if (!r.errors.empty()) throw ConfigError(r.errors);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

template <class T>
void put_list(std::ostream& os, const std::vector<T>& v) {
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k];
}

}  // namespace

void write_config(std::ostream& os, const ScenarioConfig& c) {
  os << std::setprecision(17);
  os << "[grid]\nd = " << c.d << "\nn = " << c.n << "\n\n";
  os << "[params]\neps = " << c.params.eps << "\nlambda = " << c.params.lambda
     << "\nN = " << c.params.N << "\nT = " << c.params.T
     << "\neta = " << c.params.eta << "\nc3 = " << c.params.c3 << "\n\n";
  os << "[beta]\nfamily = " << to_string(c.beta.family) << "\nm = " << c.beta.m
     << "\nc1 = " << c.beta.c1 << "\nc2 = " << c.beta.c2 << "\n\n";
  os << "[pi]\nfamily = " << to_string(c.pi.family) << "\n\n";
  os << "[initial]\npreset = " << c.initial_preset
     << "\nvalue = " << c.initial_value << "\namplitude = " << c.initial_amplitude
     << "\nk = " << c.initial_k << "\n";
  if (!c.initial_path.empty()) os << "path = " << c.initial_path << "\n";
  os << "smooth = " << (c.smooth_initial ? "true" : "false") << "\n\n";
  os << "[source]\npreset = " << c.source_preset
     << "\namplitude = " << c.source_amplitude << "\nk = " << c.source_k << "\n";
  if (!c.source_path.empty()) os << "path = " << c.source_path << "\n";
  os << "\n[solver]\nlin_tol = " << c.solver.lin_tol
     << "\nnewton_tol = " << c.solver.newton_tol
     << "\nmax_newton = " << c.solver.max_newton << "\ntau_schedule = ";
  put_list(os, c.solver.tau_factors);
  os << "\n\n[output]\ndirectory = " << c.output_directory
     << "\nstride = " << c.snapshot_stride << "\n";
  if (!c.h_levels.empty() || !c.lambda_levels.empty() || !c.eps_levels.empty()) {
    os << "\n[study]\n";
    if (!c.h_levels.empty()) { os << "h_levels = "; put_list(os, c.h_levels); os << "\n"; }
    if (!c.lambda_levels.empty()) { os << "lambda_levels = "; put_list(os, c.lambda_levels); os << "\n"; }
    if (!c.eps_levels.empty()) { os << "eps_levels = "; put_list(os, c.eps_levels); os << "\n"; }
  }
}

Grid config_grid(const ScenarioConfig& cfg) { return make_grid(cfg.d, cfg.n); }

namespace {

double cos_mode(int k, double x, double y, int d) {
  const double pi = std::numbers::pi;
  const double cx = std::cos(k * pi * x);
  return d == 1 ? cx : cx * std::cos(k * pi * y);
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    bool numeric = true;
    for (const auto& item : split_list(line)) {
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (*end != '\0') numeric = false;
      row.push_back(v);
    }
    if (numeric) rows.push_back(std::move(row));  // header rows are skipped
  }
  return rows;
}

}  // namespace

Field config_initial(const ScenarioConfig& c) {
  const Grid g = config_grid(c);
  if (c.initial_preset == "constant") return Field(g, c.initial_value);
  if (c.initial_preset == "cosine")
    return sample(g, [&](double x, double y) {
      return c.initial_value + c.initial_amplitude * cos_mode(c.initial_k, x, y, c.d);
    });
  if (c.initial_preset == "bump")
    return sample(g, [&](double x, double y) {
      double r2 = (x - 0.5) * (x - 0.5);
      if (c.d == 2) r2 += (y - 0.5) * (y - 0.5);
      return c.initial_value + c.initial_amplitude * std::exp(-r2 / 0.02);
    });
  // csv: last column of each numeric row
  const auto rows = read_csv_rows(c.initial_path);
  if (rows.size() != g.node_count())
    throw std::runtime_error("initial csv has " + std::to_string(rows.size()) +
                             " rows, grid has " + std::to_string(g.node_count()) +
                             " nodes");
  Field u(g);
  for (std::size_t k = 0; k < rows.size(); ++k) u[k] = rows[k].back();
  return u;
}

SourceSeries config_source_density(const ScenarioConfig& c) {
  const Grid g = config_grid(c);
  SourceSeries s;
  if (c.source_preset == "zero") {
    s.starts = {0.0};
    s.values = {Field(g)};
  } else if (c.source_preset == "cosine_g") {
    s.starts = {0.0};
    s.values = {sample(g, [&](double x, double y) {
      return c.source_amplitude * cos_mode(c.source_k, x, y, c.d);
    })};
  } else {
    // rows: t, g_0, ..., g_{M-1}; piecewise constant from t on
    for (const auto& row : read_csv_rows(c.source_path)) {
      if (row.size() != g.node_count() + 1)
        throw std::runtime_error("source csv row must hold a time and " +
                                 std::to_string(g.node_count()) + " values");
      s.starts.push_back(row.front());
      s.values.emplace_back(g, std::vector<double>(row.begin() + 1, row.end()));
    }
    if (s.starts.empty()) throw std::runtime_error("source csv is empty");
  }
  return s;
}

Scenario build_scenario(const ScenarioConfig& c) {
  Scenario s;
  s.params = c.params;
  s.beta = c.beta;
  s.pi = c.pi;
  s.u0 = config_initial(c);
  s.smooth_initial = c.smooth_initial;
  const SourceSeries g = config_source_density(c);
  std::vector<Field> f;
  for (const auto& gk : g.values)
    f.push_back(source_potential(gk.grid(), gk, c.solver));
  s.source = TimeSource::piecewise_constant(g.starts, std::move(f));
  return s;
}

std::vector<double> study_levels(const ScenarioConfig& c, const std::string& axis) {
  const SimParams& p = c.params;
  if (axis == "h") {
    std::vector<int> counts = c.h_levels;
    if (counts.empty()) counts = {p.N, 2 * p.N, 4 * p.N, 8 * p.N};
    std::vector<double> out;
    for (int n : counts) out.push_back(p.T / n);
    return out;
  }
  if (axis == "lambda") {
    if (!c.lambda_levels.empty()) return c.lambda_levels;
    return {p.lambda, p.lambda / 2, p.lambda / 4};
  }
  if (!c.eps_levels.empty()) return c.eps_levels;
  return {p.eps, p.eps / 2, p.eps / 4};
}

}  // namespace chemo
