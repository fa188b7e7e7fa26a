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

#include "artifacts.hpp"

#include <cmath>
#include <json.hpp>
#include <sstream>

#include "qdm/cli/cli.hpp"
#include "qdm/core/text_format.hpp"

namespace qdm::cli {
namespace detail {

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string csv_real(double x) { return format_real(x); }

void JsonWriter::separator() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!first_.empty()) {
    if (!first_.back()) out_ << ',';
    first_.back() = false;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ << '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  first_.pop_back();
  out_ << '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separator();
  out_ << '[';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  first_.pop_back();
  out_ << ']';
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
  separator();
  out_ << json_string(k) << ':';
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double x) {
  separator();
  if (std::isfinite(x)) out_ << format_real(x);
  else out_ << "null";
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t x) {
  separator();
  out_ << x;
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
  separator();
  out_ << json_string(s);
  return *this;
}

JsonWriter& JsonWriter::value(bool b) {
  separator();
  out_ << (b ? "true" : "false");
  return *this;
}

JsonWriter& JsonWriter::value(const cplx& z) {
  begin_array();
  value(z.real());
  value(z.imag());
  return end_array();
}

JsonWriter& JsonWriter::value(const ComplexMatrix& m) {
  begin_array();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) value(m(r, c));
  return end_array();
}

JsonWriter& JsonWriter::value(const std::vector<double>& xs) {
  begin_array();
  for (double x : xs) value(x);
  return end_array();
}

}  // namespace detail

std::string summary_to_json(const RunSummary& s) {
  std::ostringstream os;
  detail::JsonWriter w(os);
  w.begin_object();
  w.key("command").value(std::string_view(s.command));
  w.key("seed").value(s.seed);
  w.key("wall_time").value(s.wall_time);
  w.key("key_metrics").begin_object();
  for (const auto& [k, v] : s.key_metrics) w.key(k).value(v);
  w.end_object();
  w.key("schema_version").value(static_cast<std::uint64_t>(s.schema_version));
  w.end_object();
  return os.str();
}

RunSummary summary_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("summary: malformed JSON: ") + e.what());
  }
  try {
    RunSummary s;
    s.schema_version = j.at("schema_version").get<int>();
    if (s.schema_version != kSchemaVersion)
      throw ConfigError("summary: unsupported schema_version " + std::to_string(s.schema_version));
    s.command = j.at("command").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.wall_time = j.at("wall_time").get<double>();
    for (const auto& [k, v] : j.at("key_metrics").items())
      s.key_metrics[k] = v.is_null() ? std::nan("") : v.get<double>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("summary: schema mismatch: ") + e.what());
  }
}

}  // namespace qdm::cli
