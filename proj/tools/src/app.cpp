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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <isdim/errors.hpp>
#include <isdim/parallel.hpp>
#include <isdim/version.hpp>
#include <isdim_cli/commands.hpp>

namespace isdim::cli {

namespace {

std::size_t parse_threads(const std::string& text, const std::string& origin) {
  try {
    const auto n = parse_integer(text);
    if (n == 0) {
      throw ConfigError("thread count must be positive", origin);
    }
    return static_cast<std::size_t>(n);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), origin);
  }
}

std::string escape_pipes(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '|') {
      out += '\\';
    }
    out += c;
  }
  return out;
}

std::string schema_markdown() {
  std::string out = "| key | type | default | meaning |\n|---|---|---|---|\n";
  for (const auto& k : schema_reference()) {
    out += "| `" + k.path + "` | " + escape_pipes(k.type) + " | " +
           (k.fallback.empty() ? "" : "`" + k.fallback + "`") + " | " + escape_pipes(k.description) + " |\n";
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"isdim: importance sampling cost diagnostics for linear-Gaussian models"};
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::size_t> threads;
  bool no_timestamp = false;
  bool validate_only = false;
  bool schema = false;
  app.add_option("config", config_path, "experiment configuration file (INI)");
  app.add_option("--set", overrides, "override a config value, section.key=value (repeatable)")->take_all();
  app.add_option("--threads", threads, "worker threads (default: ISDIM_THREADS or logical cores)");
  app.add_flag("--no-timestamp", no_timestamp, "omit the generation timestamp from the output header");
  app.add_flag("--validate", validate_only, "print the normalized configuration and exit");
  app.add_flag("--schema", schema, "print the configuration key reference as a Markdown table");
  app.set_version_flag("--version", std::string(version()));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  if (schema) {
    out << schema_markdown();
    return kExitOk;
  }
  if (config_path.empty()) {
    err << "error: a configuration file is required\n";
    return kExitUsage;
  }

  ExperimentConfig config;
  try {
    if (threads) {
      set_default_threads(parse_threads(std::to_string(*threads), "--threads"));
    } else if (const char* env = std::getenv("ISDIM_THREADS"); env != nullptr && *env != '\0') {
      set_default_threads(parse_threads(env, "ISDIM_THREADS"));
    }
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      err << "input error: cannot read configuration file '" << config_path << "'\n";
      return kExitIo;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    IniDocument doc = IniDocument::parse(buffer.str());
    for (const auto& o : overrides) {
      doc.set(o);
    }
    config = validate(doc);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (validate_only) {
    for (const auto& [path, value] : config.normalized()) {
      out << path << " = " << value << '\n';
    }
    return kExitOk;
  }

  Result result;
  try {
    result = run_experiment(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }

  const std::string target = config.output();
  std::ostream& summary = target == "-" ? err : out;
  for (const auto& line : result.summaries) {
    summary << line << '\n';
  }
  try {
    write_atomically(target, render(result, config, RenderOptions{!no_timestamp}));
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << '\n';
    return kExitIo;
  }
  if (target != "-") {
    summary << "wrote " << result.table.rows.size() << " rows to " << target << '\n';
  }
  return kExitOk;
}

}  // namespace isdim::cli
