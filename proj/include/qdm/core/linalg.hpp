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

// Dense Hermitian eigensolver and linear solves used by the density-matrix
// algebra, the propagators and the effective-Hamiltonian oracle.

#include <vector>

#include "qdm/core/complex_matrix.hpp"

namespace qdm {

struct HermitianEigen {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns are eigenvectors
};

/// Eigendecomposition of the Hermitian part of m. Throws ValidationError if m
/// is not square or has non-finite entries.
HermitianEigen hermitian_eigen(const ComplexMatrix& m);

/// Ascending eigenvalues only.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

/// V diag(f(lambda)) V^dagger for a Hermitian matrix.
template <class F>
ComplexMatrix hermitian_function(const HermitianEigen& eig, F&& f) {
  const std::size_t n = eig.values.size();
  ComplexMatrix scaled(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) scaled(r, c) = eig.vectors(r, c) * cplx(f(eig.values[c]));
  return scaled * eig.vectors.adjoint();
}

/// exp(-i H t) for Hermitian H.
ComplexMatrix unitary_propagator(const HermitianEigen& h, double t);

struct LinearSolve {
  ComplexMatrix solution;
  double rcond;  // reciprocal 1-norm condition estimate of the system matrix
};

/// Solve a x = b by LU with partial pivoting.
LinearSolve lu_solve(const ComplexMatrix& a, const ComplexMatrix& b);

/// Random unitary (QR of a complex Gaussian matrix, phase-fixed); deterministic in seed.
ComplexMatrix random_unitary(std::size_t n, unsigned long long seed);

}  // namespace qdm
