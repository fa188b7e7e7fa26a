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

#include <cstring>
#include <random>
#include <vector>

#include "qdm/core/complex_matrix.hpp"
#include "qdm/dynamics/lindblad.hpp"
#include "qdm/kernels/kernels.hpp"
#include "qdm/phasemix/baker.hpp"
#include "random_models.hpp"

using namespace qdm;
using kernels::cplx;

namespace {

std::vector<cplx> random_cplx(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {d(rng), d(rng)};
  return v;
}

bool same_bits(const void* a, const void* b, std::size_t bytes) { return std::memcmp(a, b, bytes) == 0; }

// Odd sizes exercise the scalar tails of the vector loops.
const std::size_t kShapes[][3] = {{1, 1, 1}, {2, 3, 5}, {4, 4, 4}, {7, 5, 3}, {8, 8, 9}, {13, 6, 11}, {32, 17, 31}};

}  // namespace

TEST_CASE("scalar table is always available and reports its isa") {
  CHECK(kernels::scalar_table().isa == kernels::Isa::scalar);
  CHECK(kernels::isa_name(kernels::Isa::scalar) == "scalar");
  CHECK(kernels::isa_name(kernels::Isa::avx2) == "avx2");
}

TEST_CASE("force_isa pins and reset_isa restores the dispatch") {
  const kernels::Isa initial = kernels::active().isa;
  REQUIRE(kernels::force_isa(kernels::Isa::scalar));
  CHECK(kernels::active().isa == kernels::Isa::scalar);
  if (kernels::avx2_table()) {
    REQUIRE(kernels::force_isa(kernels::Isa::avx2));
    CHECK(kernels::active().isa == kernels::Isa::avx2);
  } else {
    CHECK_FALSE(kernels::force_isa(kernels::Isa::avx2));
  }
  kernels::reset_isa();
  CHECK(kernels::active().isa == initial);
}

TEST_CASE("cmatmul matches a naive triple loop") {
  std::mt19937_64 rng(11);
  for (const auto& s : kShapes) {
    const auto a = random_cplx(s[0] * s[1], rng);
    const auto b = random_cplx(s[1] * s[2], rng);
    std::vector<cplx> c(s[0] * s[2]);
    kernels::scalar_table().cmatmul(a.data(), b.data(), c.data(), s[0], s[1], s[2]);
    for (std::size_t i = 0; i < s[0]; ++i)
      for (std::size_t j = 0; j < s[2]; ++j) {
        cplx ref = 0.0;
        for (std::size_t l = 0; l < s[1]; ++l) ref += a[i * s[1] + l] * b[l * s[2] + j];
        CHECK(std::abs(c[i * s[2] + j] - ref) <= 1e-12 * (1.0 + std::abs(ref)));
      }
  }
}

TEST_CASE("avx2 kernels agree bit-for-bit with the scalar reference") {
  const kernels::KernelTable* vec = kernels::avx2_table();
  if (!vec) {
    MESSAGE("AVX2 unavailable on this build or CPU; equivalence not exercised");
    return;
  }
  const kernels::KernelTable& ref = kernels::scalar_table();
  std::mt19937_64 rng(5);

  SUBCASE("cmatmul") {
    for (const auto& s : kShapes) {
      const auto a = random_cplx(s[0] * s[1], rng);
      const auto b = random_cplx(s[1] * s[2], rng);
      std::vector<cplx> c1(s[0] * s[2]), c2(s[0] * s[2]);
      ref.cmatmul(a.data(), b.data(), c1.data(), s[0], s[1], s[2]);
      vec->cmatmul(a.data(), b.data(), c2.data(), s[0], s[1], s[2]);
      CHECK(same_bits(c1.data(), c2.data(), c1.size() * sizeof(cplx)));
    }
  }
  SUBCASE("caxpy") {
    for (std::size_t n : {0u, 1u, 2u, 3u, 17u, 64u, 1001u}) {
      const auto x = random_cplx(n, rng);
      auto y1 = random_cplx(n, rng);
      auto y2 = y1;
      const cplx alpha(0.37, -1.25);
      ref.caxpy(alpha, x.data(), y1.data(), n);
      vec->caxpy(alpha, x.data(), y2.data(), n);
      CHECK(same_bits(y1.data(), y2.data(), n * sizeof(cplx)));
    }
  }
  SUBCASE("block_average") {
    std::uniform_real_distribution<double> u;
    for (std::size_t side : {2u, 4u, 8u, 16u, 64u})
      for (std::size_t block = 1; block <= side; block *= 2) {
        std::vector<double> in(side * side), o1(side * side), o2(side * side);
        for (double& x : in) x = u(rng);
        ref.block_average(in.data(), o1.data(), side, block);
        vec->block_average(in.data(), o2.data(), side, block);
        CHECK(same_bits(o1.data(), o2.data(), o1.size() * sizeof(double)));
      }
  }
  SUBCASE("gather") {
    for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 4096u}) {
      std::vector<double> src(n), d1(n), d2(n);
      std::vector<std::uint32_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) {
        src[i] = static_cast<double>(i) * 0.5 + 1.0;
        idx[i] = static_cast<std::uint32_t>((i * 2654435761u) % n);
      }
      ref.gather(src.data(), idx.data(), d1.data(), n);
      vec->gather(src.data(), idx.data(), d2.data(), n);
      CHECK(same_bits(d1.data(), d2.data(), n * sizeof(double)));
    }
  }
}

TEST_CASE("library results do not depend on the selected isa") {
  if (!kernels::avx2_table()) return;
  testing::Gen gen(3);
  const LindbladModel model = gen.lindblad(4, 2, 0.3);
  const DensityMatrix rho0 = gen.density(4);
  const std::vector<double> times{0.0, 0.5, 1.0};

  auto run_all = [&] {
    const Trajectory tr = evolve_lindblad(model, rho0, times, 0.01);
    const auto mix = phasemix::run_mixing(phasemix::PhaseGrid::point(64, 3, 7), 8, 2);
    return std::make_pair(tr.states.back().matrix(), mix.final_grid);
  };
  kernels::force_isa(kernels::Isa::scalar);
  const auto scalar = run_all();
  kernels::force_isa(kernels::Isa::avx2);
  const auto vector = run_all();
  kernels::reset_isa();
  CHECK(scalar.first == vector.first);
  CHECK(scalar.second == vector.second);
}
