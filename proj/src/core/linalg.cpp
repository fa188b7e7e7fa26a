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

#include "qdm/core/linalg.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "qdm/error.hpp"

namespace qdm {

namespace {

using EMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EMat to_eigen(const ComplexMatrix& m) {
  return Eigen::Map<const EMat>(m.data(), static_cast<Eigen::Index>(m.rows()),
                                static_cast<Eigen::Index>(m.cols()));
}

ComplexMatrix from_eigen(const EMat& e) {
  ComplexMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  Eigen::Map<EMat>(m.data(), e.rows(), e.cols()) = e;
  return m;
}

void require_square_finite(const ComplexMatrix& m, const char* op) {
  if (!m.square() || m.empty()) throw ValidationError(std::string(op) + ": matrix must be square and non-empty");
  if (!m.all_finite()) throw ValidationError(std::string(op) + ": non-finite entry");
}

}  // namespace

HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
  require_square_finite(m, "hermitian_eigen");
  const EMat a = to_eigen(m);
  const EMat h = (a + a.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<EMat> solver(h, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw SingularityError("hermitian_eigen: solver did not converge");
  HermitianEigen out;
  out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  out.vectors = from_eigen(solver.eigenvectors());
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  require_square_finite(m, "hermitian_eigenvalues");
  const EMat a = to_eigen(m);
  const EMat h = (a + a.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<EMat> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SingularityError("hermitian_eigenvalues: solver did not converge");
  return {solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size()};
}

ComplexMatrix unitary_propagator(const HermitianEigen& h, double t) {
  return hermitian_function(h, [t](double e) { return std::exp(cplx(0.0, -e * t)); });
}

LinearSolve lu_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square_finite(a, "lu_solve");
  if (b.rows() != a.rows()) throw ValidationError("lu_solve: right-hand side has wrong row count");
  Eigen::PartialPivLU<EMat> lu(to_eigen(a));
  const EMat x = lu.solve(to_eigen(b));
  return {from_eigen(x), lu.rcond()};
}

ComplexMatrix random_unitary(std::size_t n, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  EMat z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < z.rows(); ++r)
    for (Eigen::Index c = 0; c < z.cols(); ++c) z(r, c) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<EMat> qr(z);
  EMat q = qr.householderQ();
  const EMat rr = qr.matrixQR();
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    const cplx d = rr(c, c);
    const double mag = std::abs(d);
    if (mag > 0) q.col(c) *= d / mag;
  }
  return from_eigen(q);
}

}  // namespace qdm
