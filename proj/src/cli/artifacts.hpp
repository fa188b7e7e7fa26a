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

// Artifact writers shared by the subcommands. Numbers are printed with 17
// significant digits so reruns are byte-identical.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qdm/core/complex_matrix.hpp"

namespace qdm::cli::detail {

/// Minimal streaming JSON emitter. Non-finite reals become null.
class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& out) : out_(out) {}

  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double x);
  JsonWriter& value(std::uint64_t x);
  JsonWriter& value(std::string_view s);
  JsonWriter& value(bool b);
  JsonWriter& value(const cplx& z);             // [re, im]
  JsonWriter& value(const ComplexMatrix& m);    // row-major [[re, im], ...]
  JsonWriter& value(const std::vector<double>& xs);

 private:
  void separator();
  std::ostream& out_;
  std::vector<bool> first_;  // one entry per open container
  bool after_key_ = false;
};

std::string json_string(std::string_view s);

/// CSV cell for a real: %.17g, "nan"/"inf" for non-finite values.
std::string csv_real(double x);

}  // namespace qdm::cli::detail
