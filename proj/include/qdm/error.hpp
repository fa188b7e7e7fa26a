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

#include <stdexcept>
#include <string>

namespace qdm {

/// Error categories. The CLI maps each one to a distinct exit status.
enum class ErrorKind {
  usage = 1,
  config = 2,
  numeric = 3,
  invariant = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Input violates a documented precondition or type invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Pipeline stage called out of order.
class SequencingError : public Error {
 public:
  explicit SequencingError(const std::string& what) : Error(ErrorKind::invariant, what) {}
};

/// Vanishing energy denominator or ill-conditioned resolvent.
class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

/// Time stepping left the set of density matrices.
class IntegrationError : public Error {
 public:
  explicit IntegrationError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

/// A world-ledger operation was refused (e.g. indistinguishable split children).
class RejectionError : public Error {
 public:
  explicit RejectionError(const std::string& what) : Error(ErrorKind::invariant, what) {}
};

/// A checked runtime invariant failed.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what) : Error(ErrorKind::invariant, what) {}
};

}  // namespace qdm
