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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qdm/cptest/kaon.hpp"
#include "qdm/error.hpp"
#include "random_models.hpp"

using namespace qdm;
using namespace qdm::cptest;

namespace {

KaonModel single_channel(double phi) {
  KaonModel m;
  m.n_f = 1;
  m.n_env = 1;
  m.m0 = 0.0;
  m.e_final = {-1.5};
  m.g = {cplx(0.8, 0.0)};
  m.phi = {phi};
  m.h_int = {cplx(0.3, 0.5)};
  m.epsilon = 0.1;
  m.delta = default_delta(m.m0, m.e_final);
  return m;
}

SymmetryMaps system_maps(const KaonModel& m) {
  SymmetryMaps maps = symmetry_maps(m);
  maps.n_env = 1;
  return maps;
}

ComplexMatrix intrinsic_system(const KaonModel& m) {
  const HamiltonianBlocks b = build_blocks(m);
  return b.strong + b.weak * cplx(m.epsilon);
}

}  // namespace

TEST_CASE("full Hamiltonian shape and Hermiticity") {
  testing::Gen gen(30);
  KaonModel m = gen.kaon_cp_violating(2, 3);
  while (m.n_f != 2 || m.n_env != 3) m = gen.kaon_cp_violating(2, 3);
  const ComplexMatrix h = build_full_hamiltonian(m);
  CHECK(h.rows() == 18);
  CHECK(hermitian_deviation(h) <= 1e-12);

  for (int i = 0; i < 30; ++i) CHECK(hermitian_deviation(build_full_hamiltonian(gen.kaon_cp_violating(3, 4))) <= 1e-12);

  SUBCASE("free limit is block diagonal with degenerate K, Kbar") {
    KaonModel free = m;
    free.epsilon = 0.0;
    const ComplexMatrix h0 = build_full_hamiltonian(free);
    const std::size_t ne = m.n_env;
    for (std::size_t b = 0; b < ne; ++b) {
      CHECK(h0(kK * ne + b, kK * ne + b) == h0(kKbar * ne + b, kKbar * ne + b));
      for (std::size_t j = 2 * ne; j < h0.cols(); ++j) CHECK(h0(kK * ne + b, j) == cplx(0.0));
    }
  }
  SUBCASE("real couplings give a real symmetric matrix") {
    KaonModel r = single_channel(0.0);
    r.h_int = {cplx(0.4, 0.0)};
    const ComplexMatrix hr = build_full_hamiltonian(r);
    CHECK(hr.rows() == 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(hr(i, j).imag() == 0.0);
        CHECK(hr(i, j) == hr(j, i));
      }
  }
}

TEST_CASE("CP and CPT checks") {
  const KaonModel even = single_channel(0.0);
  const KaonModel odd = single_channel(std::numbers::pi / 2);
  CHECK(cp_check(intrinsic_system(even), system_maps(even), 1e-12));
  CHECK_FALSE(cp_check(intrinsic_system(odd), system_maps(odd), 1e-12));
  CHECK(cpt_check(intrinsic_system(odd), system_maps(odd), 1e-12));
  const ComplexMatrix hs = build_blocks(odd).strong;
  CHECK(cp_check(hs, system_maps(odd), 1e-12));
  CHECK(cpt_check(hs, system_maps(odd), 1e-12));

  const SymmetryMaps maps = symmetry_maps(even);
  for (std::size_t i = 0; i < maps.cp_pairing.size(); ++i) CHECK(maps.cp_pairing[maps.cp_pairing[i]] == i);
  CHECK_THROWS_AS(cp_check(ComplexMatrix(3, 3), maps, 1e-12), ValidationError);
}

TEST_CASE("apparent violation with an intrinsically CPT-symmetric system") {
  testing::Gen gen(31);
  for (int i = 0; i < 10; ++i) {
    const KaonModel m = gen.kaon_cp_violating(3, 3);
    CHECK(cpt_check(intrinsic_system(m), system_maps(m), 1e-12));
    CHECK(std::abs(lambda_oracle(m, 0)) > 1e-6);
  }
}

TEST_CASE("K_S and K_L") {
  const KaonBasis b = kaon_basis();
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(b.k_short[0] * std::conj(b.k_long[0]) + b.k_short[1] * std::conj(b.k_long[1])) <= 1e-15);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(std::abs(b.k_short[i]) - s) <= 1e-15);
    CHECK(std::abs(std::abs(b.k_long[i]) - s) <= 1e-15);
  }
  // The pairing swaps the K and Kbar amplitudes.
  CHECK(b.k_short[1] == b.k_short[0]);
  CHECK(b.k_long[1] == -b.k_long[0]);
}

TEST_CASE("effective Hamiltonians") {
  testing::Gen gen(32);
  SUBCASE("zeroth order") {
    KaonModel m = gen.kaon_cp_violating(2, 2);
    m.m0 = 0.75;
    m.epsilon = 0.0;
    const ComplexMatrix expected{{0.75, 0.0}, {0.0, 0.75}};
    CHECK(max_abs_diff(effective_hamiltonian_perturbative(m, 0), expected) <= 1e-15);
    CHECK(max_abs_diff(effective_hamiltonian_oracle(m, 1), expected) <= 1e-15);
  }
  SUBCASE("CP-symmetric couplings give equal diagonals") {
    const KaonModel m = gen.kaon_cp_preserving(3, 3);
    for (std::size_t b = 0; b < m.n_env; ++b) {
      const ComplexMatrix h = effective_hamiltonian_perturbative(m, b);
      CHECK(std::abs(h(0, 0) - h(1, 1)) <= 1e-12);
      CHECK(std::abs(lambda_perturbative(m, b)) <= 1e-12);
      CHECK(std::abs(lambda_oracle(m, b)) <= 1e-10);
    }
  }
  SUBCASE("decaying diagonal") {
    for (int i = 0; i < 10; ++i) {
      const KaonModel m = gen.kaon_cp_violating(3, 2);
      const ComplexMatrix h = effective_hamiltonian_perturbative(m, 0);
      const ComplexMatrix anti = (h - h.adjoint()) * cplx(0.5);
      CHECK(anti(0, 0).imag() <= 0.0);
      CHECK(anti(1, 1).imag() <= 0.0);
    }
  }
  SUBCASE("Lambda equals the diagonal difference") {
    for (int i = 0; i < 10; ++i) {
      const KaonModel m = gen.kaon_cp_violating(3, 3);
      for (std::size_t b = 0; b < m.n_env; ++b) {
        const ComplexMatrix h = effective_hamiltonian_perturbative(m, b);
        CHECK(std::abs(lambda_perturbative(m, b) - (h(0, 0) - h(1, 1))) <= 1e-12);
        const ComplexMatrix o = effective_hamiltonian_oracle(m, b);
        CHECK(std::abs(lambda_oracle(m, b) - (o(0, 0) - o(1, 1))) <= 1e-15);
      }
    }
  }
  SUBCASE("singular denominator without regulator") {
    KaonModel m = single_channel(0.5);
    m.e_final = {0.0};
    m.delta = 0.0;
    CHECK_THROWS_AS(effective_hamiltonian_perturbative(m, 0), SingularityError);
    CHECK_THROWS_AS(lambda_perturbative(m, 0), SingularityError);
  }
  SUBCASE("beta out of range") {
    const KaonModel m = single_channel(0.5);
    CHECK_THROWS_AS(lambda_oracle(m, 1), ValidationError);
  }
}

TEST_CASE("Lambda scaling and oracle agreement") {
  KaonModel m = single_channel(std::numbers::pi / 2);
  const cplx l1 = lambda_perturbative(m, 0);
  CHECK(std::abs(l1) > 0.0);
  m.epsilon = 0.05;
  CHECK(std::abs(std::abs(lambda_perturbative(m, 0)) / std::abs(l1) - 0.25) <= 1e-12);
  m.epsilon = 0.1;

  testing::Gen gen(33);
  for (int i = 0; i < 5; ++i) {
    const KaonModel v = gen.kaon_cp_violating(2, 2);
    const std::vector<std::size_t> betas{0};
    const std::vector<double> eps{0.1, 0.05, 0.025};
    const auto rows = violation_scan(v, betas, eps);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) CHECK(r.epsilon_order_check >= 6.0);
    const double quarter = std::abs(rows[1].lambda_oracle) / std::abs(rows[0].lambda_oracle);
    CHECK(std::abs(quarter / 0.25 - 1.0) <= 0.05);
  }
}

TEST_CASE("violation_scan") {
  const KaonModel m = single_channel(1.0);
  CHECK(violation_scan(m, std::vector<std::size_t>{}, std::vector<double>{0.1}).empty());

  // The single-channel Lambda grows with the CP phase.
  double last = -1.0;
  for (double phi : {0.0, std::numbers::pi / 4, std::numbers::pi / 2}) {
    const auto rows = violation_scan(single_channel(phi), std::vector<std::size_t>{0}, std::vector<double>{0.1});
    const double mag = std::abs(rows[0].lambda_perturbative);
    CHECK(mag > last);
    last = mag;
  }
  CHECK(std::abs(violation_scan(single_channel(0.0), std::vector<std::size_t>{0}, std::vector<double>{0.1})[0]
                     .lambda_oracle) <= 1e-10);
}

TEST_CASE("model validation") {
  KaonModel m = single_channel(0.3);
  CHECK_NOTHROW(validate(m));
  m.epsilon = 0.5;
  CHECK_THROWS_AS(validate(m), ValidationError);
  m.epsilon = 0.1;
  m.delta = 0.0;
  CHECK_THROWS_AS(validate(m), ValidationError);
  m.delta = 1e-4;
  m.g = {};
  CHECK_THROWS_AS(validate(m), ValidationError);
  KaonModel e = single_channel(0.3);
  e.n_env = 2;
  e.h_int = {cplx(0.1), cplx(0.2)};
  e.e_env = {1.0, 1.0};
  CHECK_THROWS_AS(validate(e), ValidationError);
}
