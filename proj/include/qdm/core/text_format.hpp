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

// Plain-text matrices: one row per line, entries "re+imj" separated by
// whitespace. Also used inside config values, where ';' separates rows.

#include <string>
#include <string_view>
#include <vector>

#include "qdm/core/complex_matrix.hpp"

namespace qdm {

/// Parses "1", "-0.5j", "0.6+0.8j", "1e-3-2e-4j", "(1,2)" is not accepted.
cplx parse_complex(std::string_view token);

/// 17 significant digits, always "re+imj" / "re-imj".
std::string format_complex(cplx z);

ComplexMatrix parse_matrix(std::string_view text, char row_separator = '\n');
std::string format_matrix(const ComplexMatrix& m);

std::vector<cplx> parse_complex_list(std::string_view text);

/// "%.17g"
std::string format_real(double x);

}  // namespace qdm
