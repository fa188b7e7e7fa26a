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

// Seeded random inputs shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qdm/core/complex_matrix.hpp"
#include "qdm/core/density.hpp"
#include "qdm/cptest/kaon.hpp"
#include "qdm/dynamics/lindblad.hpp"

namespace qdm::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive range
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  std::uint64_t seed() { return engine_(); }

  cplx gaussian_cplx() { return {normal(), normal()}; }

  ComplexMatrix matrix(std::size_t rows, std::size_t cols) {
    ComplexMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = gaussian_cplx();
    return m;
  }

  ComplexMatrix hermitian(std::size_t n, double scale = 1.0) {
    ComplexMatrix a = matrix(n, n);
    ComplexMatrix h = a + a.adjoint();
    h *= cplx(0.5 * scale);
    // Symmetrize exactly so the Hermiticity check sees zero deviation.
    for (std::size_t r = 0; r < n; ++r) {
      h(r, r) = h(r, r).real();
      for (std::size_t c = r + 1; c < n; ++c) h(c, r) = std::conj(h(r, c));
    }
    return h;
  }

  /// Full-rank mixed state: A A† / Tr.
  DensityMatrix density(std::size_t n) {
    ComplexMatrix a = matrix(n, n);
    ComplexMatrix m = a * a.adjoint();
    const double tr = m.trace().real();
    m *= cplx(1.0 / tr);
    for (std::size_t r = 0; r < n; ++r) {
      m(r, r) = m(r, r).real();
      for (std::size_t c = r + 1; c < n; ++c) m(c, r) = std::conj(m(r, c));
    }
    return DensityMatrix(std::move(m));
  }

  PureState pure(std::size_t n) {
    std::vector<cplx> amps(n);
    for (auto& a : amps) a = gaussian_cplx();
    return PureState::normalized(std::move(amps));
  }

  LindbladModel lindblad(std::size_t n, std::size_t n_ops, double rate) {
    std::vector<ComplexMatrix> ops;
    for (std::size_t k = 0; k < n_ops; ++k) {
      ComplexMatrix l = matrix(n, n);
      l *= cplx(std::sqrt(rate / static_cast<double>(n)));
      ops.push_back(std::move(l));
    }
    return LindbladModel(hermitian(n), std::move(ops));
  }

  /// CP-preserving model: real weak amplitudes, zero phases. The
  /// interaction stays complex, so T alone is not a symmetry.
  cptest::KaonModel kaon_cp_preserving(std::size_t max_f, std::size_t max_env) {
    cptest::KaonModel m = kaon_common(index(1, max_f), index(1, max_env));
    for (std::size_t f = 0; f < m.n_f; ++f) {
      m.g[f] = cplx(uniform(0.3, 1.2) * (uniform() < 0.5 ? -1.0 : 1.0), 0.0);
      m.phi[f] = 0.0;
    }
    return m;
  }

  /// CP-violating model kept away from accidental cancellation: all final
  /// energies below m0 with unit gaps, sizable Im c and a phase near pi/2.
  cptest::KaonModel kaon_cp_violating(std::size_t max_f, std::size_t max_env) {
    cptest::KaonModel m = kaon_common(index(1, max_f), index(1, max_env));
    for (std::size_t f = 0; f < m.n_f; ++f) {
      m.g[f] = cplx(uniform(0.5, 1.2), 0.0);
      m.phi[f] = uniform(std::numbers::pi / 4, 3 * std::numbers::pi / 4);
    }
    for (auto& c : m.h_int) c = cplx(uniform(-0.5, 0.5), uniform(0.3, 0.8));
    m.h_final.resize(m.n_env * m.n_f);
    for (auto& d : m.h_final) d = uniform(-0.5, 0.5);
    return m;
  }

 private:
  cptest::KaonModel kaon_common(std::size_t n_f, std::size_t n_env) {
    cptest::KaonModel m;
    m.n_f = n_f;
    m.n_env = n_env;
    m.m0 = 0.0;
    double e = -uniform(1.0, 2.0);
    for (std::size_t f = 0; f < n_f; ++f) {
      m.e_final.push_back(e);
      e -= uniform(1.0, 2.0);
    }
    m.g.assign(n_f, cplx(1.0));
    m.phi.assign(n_f, 0.0);
    m.h_int.resize(n_env * n_f);
    for (auto& c : m.h_int) c = cplx(uniform(-0.6, 0.6), uniform(-0.6, 0.6));
    m.epsilon = 0.1;
    m.delta = cptest::default_delta(m.m0, m.e_final);
    return m;
  }

  std::mt19937_64 engine_;
};

}  // namespace qdm::testing
