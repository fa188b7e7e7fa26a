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

#include "qdm/core/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdm/core/linalg.hpp"
#include "qdm/error.hpp"

namespace qdm {

namespace {

double norm_squared(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return s;
}

constexpr double kPureNormTol = 1e-9;
constexpr double kMixWeightTol = 1e-12;

}  // namespace

PureState::PureState(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.empty()) throw ValidationError("PureState: empty amplitude vector");
  for (const cplx& z : amps_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw ValidationError("PureState: non-finite amplitude");
  const double dev = std::abs(std::sqrt(norm_squared(amps_)) - 1.0);
  if (dev > kPureNormTol) {
    std::ostringstream os;
    os << "PureState: norm deviates from 1 by " << dev;
    throw ValidationError(os.str());
  }
}

PureState PureState::normalized(std::vector<cplx> amplitudes) {
  const double n = std::sqrt(norm_squared(amplitudes));
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("PureState::normalized: zero or non-finite vector");
  for (cplx& z : amplitudes) z /= n;
  return PureState(std::move(amplitudes));
}

PureState PureState::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw ValidationError("PureState::basis: index out of range");
  std::vector<cplx> v(dim);
  v[index] = 1.0;
  return PureState(std::move(v));
}

DensityReport is_valid_density(const ComplexMatrix& m, const DensityTolerance& tol) {
  DensityReport rep;
  rep.square = m.square() && !m.empty();
  if (!rep.square) {
    rep.diagnostic = "not a non-empty square matrix";
    return rep;
  }
  if (!m.all_finite()) {
    rep.diagnostic = "non-finite entry";
    return rep;
  }
  rep.hermitian_deviation = hermitian_deviation(m);
  rep.trace_deviation = std::abs(m.trace() - cplx(1.0));
  rep.min_eigenvalue = hermitian_eigenvalues(m).front();

  std::ostringstream os;
  if (rep.hermitian_deviation > tol.hermitian) os << "not Hermitian (deviation " << rep.hermitian_deviation << "); ";
  if (rep.trace_deviation > tol.trace) os << "trace off by " << rep.trace_deviation << "; ";
  if (rep.min_eigenvalue < -tol.negative_eigenvalue) os << "negative eigenvalue " << rep.min_eigenvalue << "; ";
  rep.diagnostic = os.str();
  if (rep.diagnostic.size() >= 2) rep.diagnostic.resize(rep.diagnostic.size() - 2);  // drop the trailing "; "
  rep.valid = rep.diagnostic.empty();
  return rep;
}

DensityMatrix::DensityMatrix(ComplexMatrix m, const DensityTolerance& tol) : m_(std::move(m)), tol_(tol) {
  const DensityReport rep = is_valid_density(m_, tol_);
  if (!rep.valid) throw ValidationError("invalid density matrix: " + rep.diagnostic);
}

SpaceLayout::SpaceLayout(std::vector<std::size_t> factor_dims) : dims_(std::move(factor_dims)) {
  if (dims_.empty()) throw ValidationError("SpaceLayout: no factors");
  for (std::size_t d : dims_) {
    if (d < 1) throw ValidationError("SpaceLayout: factor dimension must be >= 1");
    total_ *= d;
  }
}

DensityMatrix from_pure(const PureState& psi) {
  return DensityMatrix(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()));
}

DensityMatrix mix(std::span<const std::pair<double, MixComponent>> components) {
  if (components.empty()) throw ValidationError("mix: no components");
  double total = 0.0;
  std::size_t dim = 0;
  ComplexMatrix acc;
  for (const auto& [p, comp] : components) {
    if (!(p >= 0.0)) throw ValidationError("mix: negative weight");
    total += p;
    const ComplexMatrix m = std::visit(
        [](const auto& s) -> ComplexMatrix {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, PureState>)
            return ComplexMatrix::outer(s.amplitudes(), s.amplitudes());
          else
            return s.matrix();
        },
        comp);
    if (acc.empty()) {
      dim = m.rows();
      acc = ComplexMatrix(dim, dim);
    } else if (m.rows() != dim) {
      throw ValidationError("mix: components have different dimensions");
    }
    acc.axpy(p, m);
  }
  if (std::abs(total - 1.0) > kMixWeightTol) {
    std::ostringstream os;
    os << "mix: weights sum to " << total;
    throw ValidationError(os.str());
  }
  return DensityMatrix(std::move(acc));
}

double vn_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double lambda : hermitian_eigenvalues(rho.matrix())) {
    if (lambda < -rho.tolerance().negative_eigenvalue)
      throw ValidationError("vn_entropy: negative eigenvalue " + std::to_string(lambda));
    if (lambda <= kEntropyZeroClamp) continue;
    s -= lambda * std::log(lambda);
  }
  return kBoltzmann * std::max(s, 0.0);
}

DensityMatrix partial_trace(const DensityMatrix& rho, const SpaceLayout& layout, std::size_t keep) {
  if (layout.total() != rho.dim())
    throw ValidationError("partial_trace: layout dimension " + std::to_string(layout.total()) +
                          " does not match state dimension " + std::to_string(rho.dim()));
  const auto dims = layout.factors();
  if (keep >= dims.size()) throw ValidationError("partial_trace: factor index out of range");
  std::size_t left = 1, right = 1;
  for (std::size_t i = 0; i < keep; ++i) left *= dims[i];
  for (std::size_t i = keep + 1; i < dims.size(); ++i) right *= dims[i];
  const std::size_t dk = dims[keep];

  ComplexMatrix out(dk, dk);
  const ComplexMatrix& m = rho.matrix();
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cplx s = 0.0;
      for (std::size_t a = 0; a < left; ++a)
        for (std::size_t c = 0; c < right; ++c) s += m((a * dk + i) * right + c, (a * dk + j) * right + c);
      out(i, j) = s;
    }
  return DensityMatrix(std::move(out), rho.tolerance());
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw ValidationError("trace_distance: dimension mismatch");
  double s = 0.0;
  for (double lambda : hermitian_eigenvalues(a.matrix() - b.matrix())) s += std::abs(lambda);
  return 0.5 * s;
}

double expectation(const DensityMatrix& rho, const ComplexMatrix& observable) {
  if (observable.rows() != rho.dim() || observable.cols() != rho.dim())
    throw ValidationError("expectation: observable dimension mismatch");
  return trace_of_product(rho.matrix(), observable).real();
}

}  // namespace qdm
