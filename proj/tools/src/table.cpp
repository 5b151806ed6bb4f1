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

#include <isdim_cli/table.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include <isdim/version.hpp>

namespace isdim::cli {

namespace {

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += "\"\"";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

nlohmann::ordered_json json_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) {
            return format_number(v);
          }
          return v;
        } else {
          return v;
        }
      },
      cell);
}

}  // namespace

std::vector<Cell>& Table::add_row() {
  rows.emplace_back(columns.size());
  return rows.back();
}

void Table::set(std::vector<Cell>& row, const std::string& column, Cell value) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) {
    throw std::logic_error("Table: unknown column '" + column + "'");
  }
  row[static_cast<std::size_t>(it - columns.begin())] = std::move(value);
}

std::string cell_text(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {};
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      cell);
}

std::string render_csv(const Result& result, const ExperimentConfig& config, const RenderOptions& options) {
  std::string out = "# isdim " + std::string(version()) + "\n";
  if (options.timestamp) {
    out += "# generated " + utc_timestamp() + "\n";
  }
  for (const auto& [path, value] : config.normalized()) {
    out += "# config " + path + " = " + value + "\n";
  }
  for (const auto& note : result.notes) {
    out += "# note " + note + "\n";
  }
  const auto& table = result.table;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i ? "," : "") + quote_csv(table.columns[i]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += (i ? "," : "") + quote_csv(cell_text(row[i]));
    }
    out += "\r\n";
  }
  return out;
}

std::string render_json(const Result& result, const ExperimentConfig& config, const RenderOptions& options) {
  nlohmann::ordered_json doc;
  doc["isdim_version"] = version();
  if (options.timestamp) {
    doc["generated"] = utc_timestamp();
  }
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [path, value] : config.normalized()) {
    cfg[path] = value;
  }
  doc["config"] = cfg;
  doc["notes"] = result.notes;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : result.table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      obj[result.table.columns[i]] = json_cell(row[i]);
    }
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string render(const Result& result, const ExperimentConfig& config, const RenderOptions& options) {
  return config.format() == OutputFormat::json ? render_json(result, config, options)
                                               : render_csv(result, config, options);
}

void write_atomically(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content << std::flush;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open '" + temp.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      std::error_code ignored;
      fs::remove(temp, ignored);
      throw std::runtime_error("failed writing '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw std::runtime_error("cannot move output into place at '" + path + "'");
  }
}

}  // namespace isdim::cli
