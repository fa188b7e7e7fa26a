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

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "qdm/cli/cli.hpp"
#include "qdm/core/text_format.hpp"

namespace qdm::cli {

std::string_view command_name(Command c) noexcept {
  switch (c) {
    case Command::measure: return "measure";
    case Command::lindblad: return "lindblad";
    case Command::kaon: return "kaon";
    case Command::mix: return "mix";
    case Command::ledger: return "ledger";
  }
  return "?";
}

std::optional<RunConfig> parse_args(std::span<const std::string> args, std::ostream& help_out) {
  CLI::App app{"qdm: density-matrix dynamics, measurement, CPT and mixing experiments", "qdm"};
  RunConfig rc;
  std::string command;
  std::string format = "csv";
  app.add_option("command", command, "measure | lindblad | kaon | mix | ledger")->required();
  app.add_option("--config", rc.config_path, "config file (ledger: script file)");
  app.add_option("--seed", rc.seed, "64-bit seed for the run's random stream");
  app.add_option("--out", rc.out_path, "artifact path (default: standard output)");
  app.add_option("--format", format, "csv | json");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    help_out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (command == "measure") rc.command = Command::measure;
  else if (command == "lindblad") rc.command = Command::lindblad;
  else if (command == "kaon") rc.command = Command::kaon;
  else if (command == "mix") rc.command = Command::mix;
  else if (command == "ledger") rc.command = Command::ledger;
  else throw UsageError("unknown command '" + command + "'");

  if (format == "csv") rc.format = Format::csv;
  else if (format == "json") rc.format = Format::json;
  else throw UsageError("--format must be csv or json, got '" + format + "'");

  if (rc.config_path.empty()) throw UsageError(std::string(command_name(rc.command)) + ": --config is required");
  if (app.count("--out") && rc.out_path.empty()) throw UsageError("--out: empty path");
  return rc;
}

// KeyValues -------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string where(const ConfigValue& v, const std::string& key) {
  return "line " + std::to_string(v.line) + ": key '" + key + "'";
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

double to_real(const std::string& tok, const ConfigValue& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double x = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(x)) throw std::invalid_argument(tok);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(where(v, key) + ": malformed number '" + tok + "'");
  }
}

}  // namespace

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string line(text.substr(start, end - start));
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || key.find_first_of(" \t") != std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": malformed key");
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' has no value");
    if (kv.values_.count(key))
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "' (first on line " +
                        std::to_string(kv.values_.at(key).line) + ")");
    kv.values_.emplace(key, ConfigValue{value, line_no});
  }
  return kv;
}

const ConfigValue& KeyValues::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

double KeyValues::real(const std::string& key) const {
  const ConfigValue& v = at(key);
  const auto t = tokens(v.text);
  if (t.size() != 1) throw ConfigError(where(v, key) + ": expected one number");
  return to_real(t[0], v, key);
}

double KeyValues::real_or(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

std::uint64_t KeyValues::count(const std::string& key) const {
  const ConfigValue& v = at(key);
  const std::string t = trim(v.text);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(where(v, key) + ": expected a non-negative integer");
  try {
    return std::stoull(t);
  } catch (const std::exception&) {
    throw ConfigError(where(v, key) + ": integer out of range");
  }
}

std::uint64_t KeyValues::count_or(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? count(key) : fallback;
}

std::string KeyValues::text_or(const std::string& key, std::string fallback) const {
  return has(key) ? at(key).text : std::move(fallback);
}

std::vector<double> KeyValues::reals(const std::string& key) const {
  const ConfigValue& v = at(key);
  std::vector<double> out;
  for (const auto& t : tokens(v.text)) out.push_back(to_real(t, v, key));
  return out;
}

std::vector<cplx> KeyValues::pairs(const std::string& key) const {
  const ConfigValue& v = at(key);
  std::vector<cplx> out;
  for (const auto& t : tokens(v.text)) {
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
      throw ConfigError(where(v, key) + ": expected re,im pair, got '" + t + "'");
    out.emplace_back(to_real(t.substr(0, comma), v, key), to_real(t.substr(comma + 1), v, key));
  }
  return out;
}

// Module configs ---------------------------------------------------------------

namespace {

template <class F>
auto with_key(const KeyValues& kv, const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    const std::string where_line = kv.has(key) ? "line " + std::to_string(kv.at(key).line) + ": " : "";
    throw ConfigError(where_line + "key '" + key + "': " + e.what());
  }
}

bool one_of(const std::string& k, std::initializer_list<const char*> keys) {
  for (const char* x : keys)
    if (k == x) return true;
  return false;
}

MeasureJob parse_measure(const KeyValues& kv, std::uint64_t seed) {
  kv.reject_unknown([](const std::string& k) {
    return one_of(k, {"c_up", "c_up_im", "c_down", "c_down_im", "T_a", "delta_E1", "delta_E2", "phase_mode",
                      "mc_samples", "runs", "detect_ratio"});
  });
  MeasureJob job;
  auto& c = job.config;
  c.c_up = {kv.real_or("c_up", 0.0), kv.real_or("c_up_im", 0.0)};
  c.c_down = {kv.real_or("c_down", 0.0), kv.real_or("c_down_im", 0.0)};
  c.apparatus_temperature = kv.real_or("T_a", c.apparatus_temperature);
  c.delta_e1 = kv.real_or("delta_E1", c.delta_e1);
  c.delta_e2 = kv.real_or("delta_E2", c.delta_e2);
  c.detect_ratio = kv.real_or("detect_ratio", c.detect_ratio);
  const std::string mode = kv.text_or("phase_mode", "analytic");
  if (mode == "analytic") c.phase_mode = measurement::PhaseMode::analytic;
  else if (mode == "monte_carlo") c.phase_mode = measurement::PhaseMode::monte_carlo;
  else throw ConfigError("line " + std::to_string(kv.at("phase_mode").line) + ": key 'phase_mode' must be analytic or monte_carlo");
  c.mc_samples = kv.count_or("mc_samples", c.mc_samples);
  c.seed = seed;
  job.runs = kv.count_or("runs", 1);
  if (job.runs < 1) throw ConfigError("line " + std::to_string(kv.at("runs").line) + ": key 'runs' must be >= 1");

  try {
    measurement::validate(c);
  } catch (const ValidationError& e) {
    // Messages start with the offending key name.
    throw ConfigError(std::string("invalid measurement config: ") + e.what());
  }
  return job;
}

bool is_lindblad_op_key(const std::string& k) {
  static const std::regex re("L[0-9]+");
  return std::regex_match(k, re);
}

LindbladJob parse_lindblad(const KeyValues& kv) {
  kv.reject_unknown([](const std::string& k) {
    return one_of(k, {"dim", "H", "rho0", "psi0", "times", "t_end", "n_points", "dt_max"}) || is_lindblad_op_key(k);
  });
  const std::uint64_t dim = kv.count("dim");
  if (dim < 1 || dim > 128) throw ConfigError("line " + std::to_string(kv.at("dim").line) + ": key 'dim' must be in [1, 128]");

  auto matrix = [&](const std::string& key) {
    ComplexMatrix m = with_key(kv, key, [&] { return parse_matrix(kv.at(key).text, ';'); });
    if (m.rows() != dim || m.cols() != dim)
      throw ConfigError("line " + std::to_string(kv.at(key).line) + ": key '" + key + "' is not " +
                        std::to_string(dim) + "x" + std::to_string(dim));
    return m;
  };

  ComplexMatrix h = matrix("H");
  std::vector<std::pair<int, ComplexMatrix>> ops;
  for (const auto& [k, v] : kv.entries())
    if (is_lindblad_op_key(k)) ops.emplace_back(std::stoi(k.substr(1)), matrix(k));
  std::sort(ops.begin(), ops.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ComplexMatrix> lops;
  for (auto& [i, m] : ops) lops.push_back(std::move(m));
  LindbladModel model = with_key(kv, "H", [&] { return LindbladModel(std::move(h), std::move(lops)); });

  if (kv.has("rho0") == kv.has("psi0")) throw ConfigError("exactly one of 'rho0' or 'psi0' is required");
  DensityMatrix rho0 = kv.has("rho0")
                           ? with_key(kv, "rho0", [&] { return DensityMatrix(matrix("rho0")); })
                           : with_key(kv, "psi0", [&] {
                               auto amps = parse_complex_list(kv.at("psi0").text);
                               if (amps.size() != dim) throw ValidationError("expected " + std::to_string(dim) + " amplitudes");
                               return from_pure(PureState(std::move(amps)));
                             });

  std::vector<double> times;
  if (kv.has("times")) {
    if (kv.has("t_end") || kv.has("n_points")) throw ConfigError("use either 'times' or 't_end'/'n_points'");
    times = kv.reals("times");
  } else {
    const double t_end = kv.real("t_end");
    const std::uint64_t n = kv.count_or("n_points", 11);
    if (n < 2) throw ConfigError("key 'n_points' must be >= 2");
    for (std::uint64_t i = 0; i < n; ++i) times.push_back(t_end * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  if (times.empty()) throw ConfigError("key 'times': empty time grid");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ConfigError("key 'times': must be strictly increasing");
  const double dt_max = kv.real("dt_max");
  if (!(dt_max > 0.0)) throw ConfigError("line " + std::to_string(kv.at("dt_max").line) + ": key 'dt_max' must be > 0");
  return LindbladJob{std::move(model), std::move(rho0), std::move(times), dt_max};
}

KaonJob parse_kaon(const KeyValues& kv) {
  kv.reject_unknown([](const std::string& k) {
    return one_of(k, {"n_f", "n_E", "m0", "E_f", "g", "phi_f", "h_int", "h_final", "e_env", "epsilon", "delta",
                      "betas", "epsilons"});
  });
  KaonJob job;
  auto& m = job.model;
  m.n_f = kv.count("n_f");
  m.n_env = kv.count("n_E");
  m.m0 = kv.real("m0");
  m.e_final = kv.reals("E_f");
  m.g = kv.pairs("g");
  m.phi = kv.reals("phi_f");
  m.h_int = kv.pairs("h_int");
  if (kv.has("h_final")) m.h_final = kv.reals("h_final");
  if (kv.has("e_env")) m.e_env = kv.reals("e_env");
  m.epsilon = kv.real("epsilon");
  m.delta = kv.has("delta") ? kv.real("delta") : cptest::default_delta(m.m0, m.e_final);
  try {
    cptest::validate(m);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("invalid kaon config: ") + e.what());
  }
  if (kv.has("betas")) {
    for (double b : kv.reals("betas")) {
      if (b < 0 || b != std::floor(b) || b >= static_cast<double>(m.n_env))
        throw ConfigError("line " + std::to_string(kv.at("betas").line) + ": key 'betas' has an index outside [0, n_E)");
      job.betas.push_back(static_cast<std::size_t>(b));
    }
  } else {
    for (std::size_t b = 0; b < m.n_env; ++b) job.betas.push_back(b);
  }
  job.epsilons = kv.has("epsilons") ? kv.reals("epsilons") : std::vector<double>{m.epsilon};
  for (double e : job.epsilons)
    if (!(e > 0.0 && e <= 0.2))
      throw ConfigError("line " + std::to_string(kv.at("epsilons").line) + ": key 'epsilons' value outside (0, 0.2]");
  return job;
}

phasemix::PhaseGrid parse_cell(const KeyValues& kv, const std::string& key, std::size_t side) {
  const ConfigValue& v = kv.at(key);
  const auto comma = v.text.find(',');
  if (comma == std::string::npos) throw ConfigError(where(v, key) + ": expected x,y");
  const double x = to_real(trim(std::string_view(v.text).substr(0, comma)), v, key);
  const double y = to_real(trim(std::string_view(v.text).substr(comma + 1)), v, key);
  if (x < 0 || y < 0 || x != std::floor(x) || y != std::floor(y) || x >= static_cast<double>(side) ||
      y >= static_cast<double>(side))
    throw ConfigError(where(v, key) + ": cell outside the grid");
  return phasemix::PhaseGrid::point(side, static_cast<std::size_t>(x), static_cast<std::size_t>(y));
}

MixJob parse_mix(const KeyValues& kv) {
  kv.reject_unknown(
      [](const std::string& k) { return one_of(k, {"N", "steps", "b", "coarsen_every", "start", "start_b"}); });
  const std::uint64_t side = kv.count("N");
  if (side < 2 || side > 4096 || (side & (side - 1)) != 0)
    throw ConfigError("line " + std::to_string(kv.at("N").line) + ": key 'N' must be a power of two in [2, 4096]");
  MixJob job{parse_cell(kv, "start", side), std::nullopt, 0, 0, 1};
  if (kv.has("start_b")) job.start_b = parse_cell(kv, "start_b", side);
  job.steps = kv.count("steps");
  job.block = kv.count_or("b", 0);
  job.coarsen_every = kv.count_or("coarsen_every", 1);
  if (job.block != 0 && side % job.block != 0)
    throw ConfigError("line " + std::to_string(kv.at("b").line) + ": key 'b' must divide N");
  if (job.coarsen_every < 1) throw ConfigError("key 'coarsen_every' must be >= 1");
  return job;
}

}  // namespace

ModuleConfig parse_config(std::string_view text, Command command, std::uint64_t seed) {
  if (command == Command::ledger) {
    LedgerJob job;
    try {
      job.script = worldledger::parse_script(text);
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
    job.options.seed = seed;
    return job;
  }
  const KeyValues kv = KeyValues::parse(text);
  switch (command) {
    case Command::measure: return parse_measure(kv, seed);
    case Command::lindblad: return parse_lindblad(kv);
    case Command::kaon: return parse_kaon(kv);
    case Command::mix: return parse_mix(kv);
    case Command::ledger: break;
  }
  throw UsageError("unreachable command");
}

ModuleConfig load_config(const std::string& path, Command command, std::uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), command, seed);
}

}  // namespace qdm::cli
