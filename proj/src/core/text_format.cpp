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

#include "qdm/core/text_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qdm/error.hpp"

namespace qdm {

namespace {

double parse_double(std::string_view s, std::string_view whole) {
  double v = 0.0;
  if (s.empty()) throw ValidationError("malformed number '" + std::string(whole) + "'");
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ValidationError("malformed number '" + std::string(whole) + "'");
  return v;
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

cplx parse_complex(std::string_view token) {
  if (token.empty()) throw ValidationError("empty complex literal");
  if (token.back() != 'j') return {parse_double(token, token), 0.0};
  const std::string_view body = token.substr(0, token.size() - 1);
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t cut = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  auto imag_of = [&](std::string_view s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_double(s, token);
  };
  if (cut == std::string_view::npos) return {0.0, imag_of(body)};
  return {parse_double(body.substr(0, cut), token), imag_of(body.substr(cut))};
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(cplx z) {
  std::string s = format_real(z.real());
  const double im = z.imag();
  s += std::signbit(im) ? '-' : '+';
  s += format_real(std::abs(im));
  s += 'j';
  return s;
}

ComplexMatrix parse_matrix(std::string_view text, char row_separator) {
  std::vector<cplx> entries;
  std::size_t rows = 0, cols = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(row_separator, start);
    if (end == std::string_view::npos) end = text.size();
    const auto tokens = split_ws(text.substr(start, end - start));
    if (!tokens.empty()) {
      if (rows == 0) cols = tokens.size();
      else if (tokens.size() != cols)
        throw ValidationError("matrix row " + std::to_string(rows + 1) + " has " + std::to_string(tokens.size()) +
                              " entries, expected " + std::to_string(cols));
      for (auto t : tokens) entries.push_back(parse_complex(t));
      ++rows;
    }
    start = end + 1;
  }
  if (rows == 0) throw ValidationError("empty matrix text");
  return ComplexMatrix(rows, cols, std::move(entries));
}

std::string format_matrix(const ComplexMatrix& m) {
  std::ostringstream os;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << format_complex(m(r, c));
    }
    os << '\n';
  }
  return os.str();
}

std::vector<cplx> parse_complex_list(std::string_view text) {
  std::vector<cplx> out;
  for (auto t : split_ws(text)) out.push_back(parse_complex(t));
  return out;
}

}  // namespace qdm
