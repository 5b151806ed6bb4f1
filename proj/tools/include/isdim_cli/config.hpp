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

#ifndef ISDIM_CLI_CONFIG_HPP
#define ISDIM_CLI_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace isdim::cli {

/// Parse or validation failure, carrying the field path and source line when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string message, std::string path = {}, int line = 0);
  [[nodiscard]] const std::string& path() const noexcept { return path_; }
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  std::string path_;
  int line_;
};

struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  /// 1-based source line; 0 for command-line overrides.
  int line = 0;
  [[nodiscard]] std::string path() const { return section + "." + key; }
};

class IniDocument {
 public:
  static IniDocument parse(const std::string& text);

  /// Applies "section.key=value", replacing any existing entry.
  void set(const std::string& assignment);

  [[nodiscard]] const std::vector<IniEntry>& entries() const noexcept { return entries_; }
  [[nodiscard]] const IniEntry* find(const std::string& section, const std::string& key) const;

 private:
  std::vector<IniEntry> entries_;
};

enum class Command {
  diagnose,
  sweep_cascade,
  verify_bounds,
  filter_compare,
  sweep_filter,
  deconvolve_demo,
  singular_limit,
  product_collapse,
};

std::string to_string(Command command);
std::optional<Command> command_from_string(const std::string& name);
std::vector<std::string> command_names();

enum class OutputFormat { csv, json };

/// Validated configuration with every default materialized. Values are kept
/// in canonical text form and parsed on access.
class ExperimentConfig {
 public:
  [[nodiscard]] Command command() const noexcept { return command_; }
  [[nodiscard]] const std::string& model_type() const noexcept { return model_type_; }
  [[nodiscard]] std::uint64_t seed() const;
  [[nodiscard]] OutputFormat format() const;
  [[nodiscard]] std::string output() const;

  [[nodiscard]] bool has(const std::string& path) const;
  [[nodiscard]] const std::string& text(const std::string& path) const;
  [[nodiscard]] double real(const std::string& path) const;
  [[nodiscard]] std::uint64_t integer(const std::string& path) const;
  [[nodiscard]] std::vector<double> reals(const std::string& path) const;
  [[nodiscard]] std::vector<std::size_t> integers(const std::string& path) const;
  [[nodiscard]] Eigen::VectorXd vector(const std::string& path) const;
  [[nodiscard]] Eigen::MatrixXd matrix(const std::string& path) const;

  /// (path, canonical value) in schema order.
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& normalized() const noexcept {
    return values_;
  }

 private:
  friend ExperimentConfig validate(const IniDocument& doc);
  Command command_ = Command::diagnose;
  std::string model_type_;
  std::vector<std::pair<std::string, std::string>> values_;
};

/// Checks keys against the schema of the command and model type; unknown keys,
/// missing required keys and malformed values raise ConfigError.
ExperimentConfig validate(const IniDocument& doc);

/// Value grammar helpers (exposed for tests).
double parse_real(const std::string& text);
std::uint64_t parse_integer(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
Eigen::MatrixXd parse_matrix(const std::string& text);

/// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double value);

/// One row per documented key: section, key, type, default, description.
struct KeyDoc {
  std::string path;
  std::string type;
  std::string fallback;
  std::string description;
};
std::vector<KeyDoc> schema_reference();

}  // namespace isdim::cli

#endif
