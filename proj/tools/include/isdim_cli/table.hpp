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

#ifndef ISDIM_CLI_TABLE_HPP
#define ISDIM_CLI_TABLE_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <isdim_cli/config.hpp>

namespace isdim::cli {

/// Empty, real, count, flag or text.
using Cell = std::variant<std::monostate, double, std::uint64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Starts a row filled with empty cells; set cells by column name.
  std::vector<Cell>& add_row();
  void set(std::vector<Cell>& row, const std::string& column, Cell value) const;
};

struct Result {
  Table table;
  /// Free-form provenance lines written with the header (data conventions, fits).
  std::vector<std::string> notes;
  /// One human-readable line per row.
  std::vector<std::string> summaries;
};

struct RenderOptions {
  bool timestamp = true;
};

/// CSV: '#'-prefixed header lines (version, optional timestamp, normalized
/// config, notes) followed by an RFC 4180 table.
std::string render_csv(const Result& result, const ExperimentConfig& config, const RenderOptions& options);
/// JSON object with the same metadata and "rows" as an array of objects.
std::string render_json(const Result& result, const ExperimentConfig& config, const RenderOptions& options);
std::string render(const Result& result, const ExperimentConfig& config, const RenderOptions& options);

std::string cell_text(const Cell& cell);

/// Writes through a temporary file in the same directory followed by a rename;
/// "-" writes to standard output.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace isdim::cli

#endif
