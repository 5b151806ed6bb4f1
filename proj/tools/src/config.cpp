// Copyright 2026 The isdim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <isdim_cli/config.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace isdim::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
  });
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  return parts;
}

std::vector<std::string> tokens(const std::string& s) {
  std::string spaced = s;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream in(spaced);
  std::vector<std::string> out;
  std::string token;
  while (in >> token) {
    out.push_back(token);
  }
  return out;
}

enum class Kind { integer, real, text, choice, real_list, integer_list, vector, matrix };
enum class Bound { none, positive, nonnegative, at_least_one, at_least_two, at_least_unity };

struct Spec {
  std::string section;
  std::string key;
  Kind kind = Kind::real;
  std::optional<std::string> fallback;
  bool required = false;
  std::vector<std::string> choices;
  Bound bound = Bound::none;
  std::string description;
  std::string bound_message;

  [[nodiscard]] std::string path() const { return section + "." + key; }
};

Spec key(std::string section, std::string name, Kind kind, std::optional<std::string> fallback,
         std::string description, Bound bound = Bound::none, std::vector<std::string> choices = {}) {
  Spec s;
  s.section = std::move(section);
  s.key = std::move(name);
  s.kind = kind;
  s.required = !fallback.has_value();
  s.fallback = std::move(fallback);
  s.description = std::move(description);
  s.bound = bound;
  s.choices = std::move(choices);
  return s;
}

Spec optional_key(std::string section, std::string name, Kind kind, std::string description,
                  Bound bound = Bound::none) {
  Spec s = key(std::move(section), std::move(name), kind, std::string(), std::move(description), bound);
  s.fallback.reset();
  s.required = false;
  return s;
}

Spec covariance_scalar(std::string name, std::string description) {
  Spec s = key("model", std::move(name), Kind::real, "1", std::move(description), Bound::positive);
  s.bound_message = "covariance scalar must be positive";
  return s;
}

const std::map<Command, std::vector<std::string>>& compatible_models() {
  static const std::map<Command, std::vector<std::string>> table = {
      {Command::diagnose, {"cascade", "dense-ip", "gaussian-pair", "filter"}},
      {Command::sweep_cascade, {"cascade"}},
      {Command::verify_bounds, {"gaussian-shift"}},
      {Command::filter_compare, {"filter"}},
      {Command::sweep_filter, {"filter"}},
      {Command::deconvolve_demo, {"deconvolution"}},
      {Command::singular_limit, {"potential"}},
      {Command::product_collapse, {"product"}},
  };
  return table;
}

std::vector<std::string> all_model_types() {
  return {"cascade", "dense-ip", "gaussian-pair", "filter", "gaussian-shift", "potential", "product",
          "deconvolution"};
}

std::optional<std::string> particles_default(Command c) {
  switch (c) {
    case Command::filter_compare:
    case Command::singular_limit:
      return "100000";
    case Command::product_collapse:
      return "1000000";
    default:
      return std::nullopt;
  }
}

std::vector<Spec> run_specs(Command c) {
  std::vector<Spec> specs = {
      key("run", "command", Kind::choice, std::nullopt, "experiment to run", Bound::none, command_names()),
      key("run", "seed", Kind::integer, std::nullopt, "master seed, must be explicit and nonzero",
          Bound::at_least_one),
  };
  if (auto n = particles_default(c)) {
    specs.push_back(key("run", "n_particles", Kind::integer, *n, "Monte Carlo sample size"));
  }
  if (c == Command::verify_bounds) {
    specs.push_back(key("run", "replications", Kind::integer, "10000", "independent samplers per grid point",
                        Bound::at_least_one));
  }
  specs.push_back(key("run", "output", Kind::text, "-", "output path, - for standard output"));
  specs.push_back(key("run", "format", Kind::choice, "csv", "csv or json", Bound::none, {"csv", "json"}));
  return specs;
}

std::vector<Spec> model_specs(const std::string& type, const std::string& form) {
  std::vector<Spec> specs = {
      key("model", "type", Kind::choice, std::nullopt, "model family", Bound::none, all_model_types())};
  auto add = [&](Spec s) { specs.push_back(std::move(s)); };
  if (type == "cascade") {
    add(key("model", "beta", Kind::real, "1", "spectral decay exponent", Bound::nonnegative));
    add(key("model", "gamma", Kind::real, "1", "noise level", Bound::positive));
    add(key("model", "d", Kind::integer, "4", "truncation dimension", Bound::at_least_one));
    add(optional_key("model", "truth", Kind::vector, "data-space truth coordinates (zero if omitted)"));
  } else if (type == "dense-ip") {
    add(key("model", "K", Kind::matrix, std::nullopt, "forward operator"));
    add(key("model", "Sigma", Kind::matrix, std::nullopt, "prior covariance"));
    add(key("model", "Gamma", Kind::matrix, std::nullopt, "noise covariance"));
    add(optional_key("model", "y", Kind::vector, "data (zero if omitted)"));
  } else if (type == "gaussian-pair") {
    add(key("model", "target_mean", Kind::vector, std::nullopt, "target mean"));
    add(key("model", "target_var", Kind::vector, std::nullopt, "target variances"));
    add(optional_key("model", "proposal_mean", Kind::vector, "proposal mean (zero if omitted)"));
    add(optional_key("model", "proposal_var", Kind::vector, "proposal variances (one if omitted)"));
  } else if (type == "filter") {
    add(key("model", "form", Kind::choice, "scalar", "scalar or dense", Bound::none, {"scalar", "dense"}));
    if (form == "dense") {
      for (const char* name : {"M", "H", "P", "Q", "R"}) {
        add(key("model", name, Kind::matrix, std::nullopt, std::string("operator ") + name));
      }
    } else {
      add(key("model", "m", Kind::real, "1", "dynamics multiplier"));
      add(key("model", "h", Kind::real, "1", "observation multiplier"));
      add(covariance_scalar("p", "initial covariance scalar"));
      add(covariance_scalar("q", "dynamics noise scalar"));
      add(covariance_scalar("r", "observation noise scalar"));
      add(key("model", "d", Kind::integer, "1", "state dimension", Bound::at_least_one));
    }
    add(optional_key("model", "y", Kind::vector, "observation y1 (zero if omitted)"));
  } else if (type == "gaussian-shift") {
    add(key("model", "shift", Kind::real, "1", "target mean shift per coordinate"));
    add(key("model", "dim", Kind::integer, "1", "dimension", Bound::at_least_one));
  } else if (type == "potential") {
    add(key("model", "kind", Kind::choice, "quadratic", "quadratic or flat", Bound::none, {"quadratic", "flat"}));
    add(key("model", "curvature", Kind::real, "1", "h'' at the minimizer", Bound::positive));
    add(key("model", "center", Kind::real, "0", "minimizer u*"));
    add(key("model", "proposal_mean", Kind::real, "0", "proposal mean"));
    add(key("model", "proposal_var", Kind::real, "1", "proposal variance", Bound::positive));
  } else if (type == "product") {
    add(key("model", "rho_1", Kind::real, format_number(std::numbers::e), "rho of one factor",
            Bound::at_least_unity));
  } else if (type == "deconvolution") {
    add(key("model", "t", Kind::real, "1", "kernel smoothing exponent", Bound::nonnegative));
    add(key("model", "s", Kind::real, "0.5", "prior regularity exponent", Bound::nonnegative));
    add(key("model", "d", Kind::integer, "256", "number of Fourier modes", Bound::at_least_one));
    add(key("model", "truth_decay", Kind::real, "1.5", "truth coordinates j^-truth_decay", Bound::nonnegative));
  }
  return specs;
}

std::vector<Spec> grid_specs(Command c) {
  switch (c) {
    case Command::sweep_cascade:
      return {
          key("grid", "regime", Kind::choice, std::nullopt, "scaling regime", Bound::none,
              {"small_noise_fixed_d", "small_noise_infinite_d", "large_d", "joint", "regularity"}),
          optional_key("grid", "gamma", Kind::real_list, "noise levels (small-noise regimes)", Bound::positive),
          optional_key("grid", "d", Kind::integer_list, "dimensions (large_d, joint)", Bound::at_least_one),
          optional_key("grid", "beta", Kind::real_list, "decay exponents (regularity)", Bound::positive),
          key("grid", "alpha", Kind::real, "2", "gamma = d^-alpha in the joint regime"),
          key("grid", "d_max", Kind::integer, "16384", "truncation standing in for d = infinity",
              Bound::at_least_one),
          key("grid", "data_seeds", Kind::integer, "32", "datasets per in-probability row", Bound::at_least_one),
      };
    case Command::verify_bounds:
      return {key("grid", "n", Kind::integer_list, "10, 100, 1000", "particle counts", Bound::at_least_one)};
    case Command::sweep_filter:
      return {
          key("grid", "init", Kind::choice, "stationary", "initial covariance", Bound::none,
              {"stationary", "fixed_p"}),
          key("grid", "driver", Kind::choice, std::nullopt, "swept parameter", Bound::none,
              {"r", "r_equals_q", "d", "truncation"}),
          optional_key("grid", "r", Kind::real_list, "noise levels (r, r_equals_q)", Bound::positive),
          optional_key("grid", "d", Kind::integer_list, "dimensions (d) or truncations (truncation)",
                       Bound::at_least_one),
          key("grid", "data_seeds", Kind::integer, "32", "datasets per row", Bound::at_least_one),
          key("grid", "p_decay", Kind::real, "2", "P eigenvalues p j^-p_decay (truncation)", Bound::nonnegative),
      };
    case Command::deconvolve_demo:
      return {key("grid", "gamma", Kind::real_list, "0.1, 0.01, 0.001, 0.0001", "noise levels", Bound::positive)};
    case Command::singular_limit:
      return {key("grid", "epsilon", Kind::real_list, "0.1, 0.01, 0.001, 0.0001", "temperatures",
                   Bound::positive)};
    case Command::product_collapse:
      return {
          key("grid", "d", Kind::integer_list, "1, 2, 3, 5, 10, 20, 50", "product sizes", Bound::at_least_one),
          key("grid", "mc_max_d", Kind::integer, "3", "largest d with a Monte Carlo column"),
      };
    default:
      return {};
  }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) {
      out += sep;
    }
    out += parts[i];
  }
  return out;
}

void check_bound(const Spec& spec, double v, int line) {
  auto fail = [&](const std::string& what) {
    throw ConfigError(spec.bound_message.empty() ? what : spec.bound_message, spec.path(), line);
  };
  switch (spec.bound) {
    case Bound::none:
      return;
    case Bound::positive:
      if (!(v > 0.0)) {
        fail("must be positive");
      }
      return;
    case Bound::nonnegative:
      if (!(v >= 0.0)) {
        fail("must be nonnegative");
      }
      return;
    case Bound::at_least_one:
      if (!(v >= 1.0)) {
        fail(spec.key == "seed" ? "seed must be explicit and nonzero" : "must be at least 1");
      }
      return;
    case Bound::at_least_two:
      if (!(v >= 2.0)) {
        fail("must be at least 2");
      }
      return;
    case Bound::at_least_unity:
      if (!(v >= 1.0)) {
        fail("must be at least 1");
      }
      return;
  }
}

std::string canonical(const Spec& spec, const std::string& raw, int line) {
  try {
    switch (spec.kind) {
      case Kind::text:
        if (raw.empty()) {
          throw ConfigError("must not be empty", spec.path(), line);
        }
        return raw;
      case Kind::choice:
        if (std::find(spec.choices.begin(), spec.choices.end(), raw) == spec.choices.end()) {
          throw ConfigError("'" + raw + "' is not one of: " + join(spec.choices, ", "), spec.path(), line);
        }
        return raw;
      case Kind::real: {
        const double v = parse_real(raw);
        check_bound(spec, v, line);
        return format_number(v);
      }
      case Kind::integer: {
        const auto v = parse_integer(raw);
        check_bound(spec, static_cast<double>(v), line);
        return std::to_string(v);
      }
      case Kind::real_list:
      case Kind::vector: {
        const auto values = parse_real_list(raw);
        if (spec.kind == Kind::real_list && values.empty()) {
          throw ConfigError("list must not be empty", spec.path(), line);
        }
        std::vector<std::string> parts;
        for (double v : values) {
          check_bound(spec, v, line);
          parts.push_back(format_number(v));
        }
        return join(parts, ", ");
      }
      case Kind::integer_list: {
        std::vector<std::string> parts;
        for (const auto& t : tokens(raw)) {
          const auto v = parse_integer(t);
          check_bound(spec, static_cast<double>(v), line);
          parts.push_back(std::to_string(v));
        }
        if (parts.empty()) {
          throw ConfigError("list must not be empty", spec.path(), line);
        }
        return join(parts, ", ");
      }
      case Kind::matrix: {
        const Eigen::MatrixXd m = parse_matrix(raw);
        std::vector<std::string> rows;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          std::vector<std::string> cells;
          for (Eigen::Index j = 0; j < m.cols(); ++j) {
            cells.push_back(format_number(m(i, j)));
          }
          rows.push_back(join(cells, ", "));
        }
        return join(rows, "; ");
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what(), spec.path(), line);
  }
  return raw;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::integer:
      return "integer";
    case Kind::real:
      return "real";
    case Kind::text:
      return "string";
    case Kind::choice:
      return "choice";
    case Kind::real_list:
      return "real list";
    case Kind::integer_list:
      return "integer list";
    case Kind::vector:
      return "vector";
    case Kind::matrix:
      return "matrix";
  }
  return "?";
}

}  // namespace

ConfigError::ConfigError(std::string message, std::string path, int line)
    : std::runtime_error([&] {
        std::string text;
        if (line > 0) {
          text += "line " + std::to_string(line) + ": ";
        }
        if (!path.empty()) {
          text += path + ": ";
        }
        return text + message;
      }()),
      path_(std::move(path)),
      line_(line) {}

IniDocument IniDocument::parse(const std::string& text) {
  IniDocument doc;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::vector<std::string> seen_sections;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("unterminated section header", {}, line_no);
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_name(section)) {
        throw ConfigError("invalid section name '" + section + "'", {}, line_no);
      }
      if (std::find(seen_sections.begin(), seen_sections.end(), section) != seen_sections.end()) {
        throw ConfigError("section [" + section + "] appears twice", {}, line_no);
      }
      seen_sections.push_back(section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value'", {}, line_no);
    }
    const std::string name = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!valid_name(name)) {
      throw ConfigError("invalid key '" + name + "'", {}, line_no);
    }
    if (section.empty()) {
      throw ConfigError("key '" + name + "' appears before any section", {}, line_no);
    }
    if (!value.empty() && value.front() == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string::npos) {
        throw ConfigError("unterminated quoted value", section + "." + name, line_no);
      }
      const std::string rest = trim(value.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') {
        throw ConfigError("unexpected text after quoted value", section + "." + name, line_no);
      }
      value = value.substr(1, close - 1);
    } else {
      for (std::size_t i = 1; i < value.size(); ++i) {
        if (value[i] == '#' && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
          value = trim(value.substr(0, i));
          break;
        }
      }
    }
    if (doc.find(section, name) != nullptr) {
      throw ConfigError("duplicate key", section + "." + name, line_no);
    }
    doc.entries_.push_back({section, name, value, line_no});
  }
  return doc;
}

void IniDocument::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  const std::string path = trim(assignment.substr(0, eq));
  const auto dot = path.find('.');
  if (eq == std::string::npos || dot == std::string::npos) {
    throw ConfigError("override '" + assignment + "' must have the form section.key=value");
  }
  const std::string section = path.substr(0, dot);
  const std::string name = path.substr(dot + 1);
  if (!valid_name(section) || !valid_name(name)) {
    throw ConfigError("invalid override path '" + path + "'");
  }
  const std::string value = trim(assignment.substr(eq + 1));
  for (auto& e : entries_) {
    if (e.section == section && e.key == name) {
      e.value = value;
      e.line = 0;
      return;
    }
  }
  entries_.push_back({section, name, value, 0});
}

const IniEntry* IniDocument::find(const std::string& section, const std::string& key) const {
  for (const auto& e : entries_) {
    if (e.section == section && e.key == key) {
      return &e;
    }
  }
  return nullptr;
}

std::string to_string(Command command) {
  switch (command) {
    case Command::diagnose:
      return "diagnose";
    case Command::sweep_cascade:
      return "sweep-cascade";
    case Command::verify_bounds:
      return "verify-bounds";
    case Command::filter_compare:
      return "filter-compare";
    case Command::sweep_filter:
      return "sweep-filter";
    case Command::deconvolve_demo:
      return "deconvolve-demo";
    case Command::singular_limit:
      return "singular-limit";
    case Command::product_collapse:
      return "product-collapse";
  }
  return "unknown";
}

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& [c, models] : compatible_models()) {
    names.push_back(to_string(c));
  }
  return names;
}

std::optional<Command> command_from_string(const std::string& name) {
  for (const auto& [c, models] : compatible_models()) {
    if (to_string(c) == name) {
      return c;
    }
  }
  return std::nullopt;
}

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') {
    ++begin;
  }
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError("'" + t + "' is not a finite number");
  }
  return v;
}

std::uint64_t parse_integer(const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (!t.empty() && ec == std::errc() && ptr == t.data() + t.size()) {
    return v;
  }
  double real = 0.0;
  try {
    real = parse_real(t);
  } catch (const ConfigError&) {
    throw ConfigError("'" + t + "' is not a nonnegative integer");
  }
  if (real < 0.0 || real != std::floor(real) || real > 9007199254740992.0) {
    throw ConfigError("'" + t + "' is not a nonnegative integer");
  }
  return static_cast<std::uint64_t>(real);
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& t : tokens(text)) {
    values.push_back(parse_real(t));
  }
  return values;
}

Eigen::MatrixXd parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : split(text, ';')) {
    if (trim(row).empty()) {
      continue;
    }
    rows.push_back(parse_real_list(row));
  }
  if (rows.empty() || rows.front().empty()) {
    throw ConfigError("matrix must not be empty");
  }
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw ConfigError("matrix rows have different lengths");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

std::string format_number(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  if (value == 0.0) {
    return "0";
  }
  std::array<char, 64> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return {buffer.data(), ptr};
}

ExperimentConfig validate(const IniDocument& doc) {
  for (const auto& e : doc.entries()) {
    if (e.section != "run" && e.section != "model" && e.section != "grid") {
      throw ConfigError("unknown section [" + e.section + "]", e.path(), e.line);
    }
  }
  const IniEntry* command_entry = doc.find("run", "command");
  if (command_entry == nullptr) {
    throw ConfigError("missing required key", "run.command");
  }
  const auto command = command_from_string(command_entry->value);
  if (!command) {
    throw ConfigError("unknown command '" + command_entry->value + "' (expected one of: " +
                          join(command_names(), ", ") + ")",
                      "run.command", command_entry->line);
  }
  const IniEntry* type_entry = doc.find("model", "type");
  if (type_entry == nullptr) {
    throw ConfigError("missing required key", "model.type");
  }
  const auto& allowed = compatible_models().at(*command);
  if (std::find(allowed.begin(), allowed.end(), type_entry->value) == allowed.end()) {
    throw ConfigError("command '" + to_string(*command) + "' requires a model of type " + join(allowed, " | ") +
                          ", got '" + type_entry->value + "'",
                      "model.type", type_entry->line);
  }
  std::string form = "scalar";
  if (const IniEntry* form_entry = doc.find("model", "form")) {
    form = form_entry->value;
  }

  std::vector<Spec> specs = run_specs(*command);
  for (auto& s : model_specs(type_entry->value, form)) {
    specs.push_back(std::move(s));
  }
  for (auto& s : grid_specs(*command)) {
    specs.push_back(std::move(s));
  }

  for (const auto& e : doc.entries()) {
    const bool known =
        std::any_of(specs.begin(), specs.end(), [&](const Spec& s) { return s.section == e.section && s.key == e.key; });
    if (!known) {
      throw ConfigError("unknown key '" + e.key + "' for command '" + to_string(*command) + "' with model '" +
                            type_entry->value + "'",
                        e.path(), e.line);
    }
  }

  ExperimentConfig config;
  config.command_ = *command;
  config.model_type_ = type_entry->value;
  for (const auto& spec : specs) {
    if (const IniEntry* e = doc.find(spec.section, spec.key)) {
      config.values_.emplace_back(spec.path(), canonical(spec, e->value, e->line));
    } else if (spec.fallback) {
      config.values_.emplace_back(spec.path(), canonical(spec, *spec.fallback, 0));
    } else if (spec.required) {
      throw ConfigError(spec.key == "seed" ? "seed must be explicit and nonzero" : "missing required key",
                        spec.path());
    }
  }

  auto require_list = [&](const std::string& path, const std::string& why) {
    if (!config.has(path)) {
      throw ConfigError("required " + why, path);
    }
  };
  if (*command == Command::sweep_cascade) {
    const std::string regime = config.text("grid.regime");
    if (regime == "small_noise_fixed_d" || regime == "small_noise_infinite_d") {
      require_list("grid.gamma", "for regime " + regime);
    } else if (regime == "large_d" || regime == "joint") {
      require_list("grid.d", "for regime " + regime);
    } else {
      require_list("grid.beta", "for regime " + regime);
    }
  }
  if (*command == Command::sweep_filter) {
    if (form != "scalar") {
      throw ConfigError("sweep-filter requires the scalar form", "model.form");
    }
    const std::string driver = config.text("grid.driver");
    if (driver == "r" || driver == "r_equals_q") {
      require_list("grid.r", "for driver " + driver);
    } else {
      require_list("grid.d", "for driver " + driver);
    }
  }
  return config;
}

std::uint64_t ExperimentConfig::seed() const { return integer("run.seed"); }

OutputFormat ExperimentConfig::format() const {
  return text("run.format") == "json" ? OutputFormat::json : OutputFormat::csv;
}

std::string ExperimentConfig::output() const { return text("run.output"); }

bool ExperimentConfig::has(const std::string& path) const {
  return std::any_of(values_.begin(), values_.end(), [&](const auto& kv) { return kv.first == path; });
}

const std::string& ExperimentConfig::text(const std::string& path) const {
  for (const auto& [p, v] : values_) {
    if (p == path) {
      return v;
    }
  }
  throw ConfigError("no value", path);
}

double ExperimentConfig::real(const std::string& path) const { return parse_real(text(path)); }

std::uint64_t ExperimentConfig::integer(const std::string& path) const { return parse_integer(text(path)); }

std::vector<double> ExperimentConfig::reals(const std::string& path) const { return parse_real_list(text(path)); }

std::vector<std::size_t> ExperimentConfig::integers(const std::string& path) const {
  std::vector<std::size_t> out;
  for (const auto& t : tokens(text(path))) {
    out.push_back(static_cast<std::size_t>(parse_integer(t)));
  }
  return out;
}

Eigen::VectorXd ExperimentConfig::vector(const std::string& path) const {
  const auto values = reals(path);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::MatrixXd ExperimentConfig::matrix(const std::string& path) const { return parse_matrix(text(path)); }

std::vector<KeyDoc> schema_reference() {
  std::vector<KeyDoc> docs;
  std::vector<std::string> seen;
  auto add = [&](const std::vector<Spec>& specs) {
    for (const auto& s : specs) {
      if (std::find(seen.begin(), seen.end(), s.path()) != seen.end()) {
        continue;
      }
      seen.push_back(s.path());
      std::string type = kind_name(s.kind);
      if (s.kind == Kind::choice) {
        type += " (" + join(s.choices, " | ") + ")";
      }
      docs.push_back({s.path(), type, s.required ? "required" : s.fallback.value_or("omitted"), s.description});
    }
  };
  for (const auto& [c, models] : compatible_models()) {
    add(run_specs(c));
  }
  for (const auto& type : all_model_types()) {
    add(model_specs(type, "scalar"));
    if (type == "filter") {
      add(model_specs(type, "dense"));
    }
  }
  for (const auto& [c, models] : compatible_models()) {
    add(grid_specs(c));
  }
  return docs;
}

}  // namespace isdim::cli
