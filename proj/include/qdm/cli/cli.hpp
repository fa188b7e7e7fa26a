// Copyright 2026 The qdm Authors
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

#pragma once

// Batch front end: argument parsing, flat "key = value" configs, dispatch to
// the experiment modules and artifact writers.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qdm/cptest/kaon.hpp"
#include "qdm/dynamics/lindblad.hpp"
#include "qdm/error.hpp"
#include "qdm/measurement/pipeline.hpp"
#include "qdm/phasemix/baker.hpp"
#include "qdm/worldledger/ledger.hpp"

namespace qdm::cli {

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// Config-file syntax or key problem (exit status 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

enum class Command { measure, lindblad, kaon, mix, ledger };
enum class Format { csv, json };

std::string_view command_name(Command c) noexcept;

struct RunConfig {
  Command command = Command::measure;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_path;  // empty = standard output
  Format format = Format::csv;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// args excludes the program name. Throws UsageError. Returns nullopt when
/// help was requested (help text is written to `help_out`).
std::optional<RunConfig> parse_args(std::span<const std::string> args, std::ostream& help_out);

// Flat key = value files -------------------------------------------------------

struct ConfigValue {
  std::string text;
  std::size_t line = 0;
};

class KeyValues {
 public:
  /// '#' starts a comment. Throws ConfigError with the line number on
  /// malformed lines or duplicate keys.
  static KeyValues parse(std::string_view text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const ConfigValue& at(const std::string& key) const;

  double real(const std::string& key) const;
  double real_or(const std::string& key, double fallback) const;
  std::uint64_t count(const std::string& key) const;
  std::uint64_t count_or(const std::string& key, std::uint64_t fallback) const;
  std::string text_or(const std::string& key, std::string fallback) const;
  std::vector<double> reals(const std::string& key) const;
  /// "re,im" pairs separated by whitespace.
  std::vector<cplx> pairs(const std::string& key) const;

  /// Throws ConfigError naming the first key not accepted by `allowed`.
  template <class Pred>
  void reject_unknown(Pred allowed) const {
    for (const auto& [k, v] : values_)
      if (!allowed(k)) throw ConfigError("line " + std::to_string(v.line) + ": unknown key '" + k + "'");
  }

  const std::map<std::string, ConfigValue>& entries() const noexcept { return values_; }

 private:
  std::map<std::string, ConfigValue> values_;
};

struct MeasureJob {
  measurement::MeasurementConfig config;
  std::uint64_t runs = 1;
};

struct LindbladJob {
  LindbladModel model;
  DensityMatrix rho0;
  std::vector<double> times;
  double dt_max;
};

struct KaonJob {
  cptest::KaonModel model;
  std::vector<std::size_t> betas;
  std::vector<double> epsilons;
};

struct MixJob {
  phasemix::PhaseGrid start;
  std::optional<phasemix::PhaseGrid> start_b;
  std::size_t steps = 0;
  std::size_t block = 0;
  std::size_t coarsen_every = 1;
};

struct LedgerJob {
  std::vector<worldledger::Command> script;
  worldledger::ScriptOptions options;
};

using ModuleConfig = std::variant<MeasureJob, LindbladJob, KaonJob, MixJob, LedgerJob>;

/// Parses config text for `command`. Module invariants are validated here;
/// violations raise ConfigError naming the key.
ModuleConfig parse_config(std::string_view text, Command command, std::uint64_t seed);

/// Reads `path` and calls parse_config. Missing file is a ConfigError.
ModuleConfig load_config(const std::string& path, Command command, std::uint64_t seed);

// Run summary -----------------------------------------------------------------

inline constexpr int kSchemaVersion = 1;

struct RunSummary {
  std::string command;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds
  std::map<std::string, double> key_metrics;
  int schema_version = kSchemaVersion;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

std::string summary_to_json(const RunSummary& s);
/// Throws ConfigError on schema mismatch.
RunSummary summary_from_json(std::string_view text);

/// Runs the job and writes the artifact (CSV or JSON) to `out`.
RunSummary execute(const RunConfig& config, const ModuleConfig& job, std::ostream& out);

/// Whole command line: parse, load, execute, write artifact, print the
/// summary as one JSON line on `err`. Returns the process exit status.
int run_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace qdm::cli
