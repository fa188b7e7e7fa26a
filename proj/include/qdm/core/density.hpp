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

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qdm/core/complex_matrix.hpp"

namespace qdm {

/// Tolerances applied when a matrix is admitted as a density matrix.
struct DensityTolerance {
  double hermitian = 1e-10;
  double trace = 1e-10;
  double negative_eigenvalue = 1e-10;
};

/// Normalized state vector. Construction rejects norms off by more than 1e-9.
class PureState {
 public:
  explicit PureState(std::vector<cplx> amplitudes);

  /// Rescales to unit norm; rejects the zero vector.
  static PureState normalized(std::vector<cplx> amplitudes);
  static PureState basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  const cplx& operator[](std::size_t i) const noexcept { return amps_[i]; }

 private:
  std::vector<cplx> amps_;
};

struct DensityReport {
  bool valid = false;
  bool square = false;
  double hermitian_deviation = 0.0;
  double trace_deviation = 0.0;   // |Tr rho - 1|
  double min_eigenvalue = 0.0;    // of the Hermitian part
  std::string diagnostic;         // empty when valid
};

/// Checks Hermiticity, unit trace and positivity. Never throws.
DensityReport is_valid_density(const ComplexMatrix& m, const DensityTolerance& tol = {});

/// Hermitian, unit-trace, positive-semidefinite matrix. Immutable.
class DensityMatrix {
 public:
  /// Throws ValidationError with the report's diagnostic on failure.
  explicit DensityMatrix(ComplexMatrix m, const DensityTolerance& tol = {});

  std::size_t dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return m_(r, c); }

  /// Eigenvalues down to -tolerance().negative_eigenvalue count as zero in the entropy.
  const DensityTolerance& tolerance() const noexcept { return tol_; }

  friend bool operator==(const DensityMatrix& a, const DensityMatrix& b) { return a.m_ == b.m_; }

 private:
  ComplexMatrix m_;
  DensityTolerance tol_;
};

/// Ordered tensor factors, first factor most significant in the flat index.
class SpaceLayout {
 public:
  explicit SpaceLayout(std::vector<std::size_t> factor_dims);
  std::span<const std::size_t> factors() const noexcept { return dims_; }
  std::size_t total() const noexcept { return total_; }

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 1;
};

DensityMatrix from_pure(const PureState& psi);

using MixComponent = std::variant<PureState, DensityMatrix>;

/// rho = sum_k p_k rho_k. Weights must be >= 0 and sum to 1 within 1e-12.
DensityMatrix mix(std::span<const std::pair<double, MixComponent>> components);

/// S = -sum lambda ln lambda in nats (k_B = 1).
double vn_entropy(const DensityMatrix& rho);

/// Reduced state on factor `keep`, tracing out all others.
DensityMatrix partial_trace(const DensityMatrix& rho, const SpaceLayout& layout, std::size_t keep);

/// (1/2) || a - b ||_1
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Re Tr(rho A) for Hermitian A.
double expectation(const DensityMatrix& rho, const ComplexMatrix& observable);

/// Eigenvalue below which entropy treats a level as empty.
inline constexpr double kEntropyZeroClamp = 1e-12;

/// Output scale for entropies. Internally k_B = 1, so entropies are nats.
inline constexpr double kBoltzmann = 1.0;

}  // namespace qdm
