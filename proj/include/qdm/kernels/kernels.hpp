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

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2 version; the active table is chosen once from CPUID.
// Both paths perform the same floating-point operations in the same order,
// so they agree bit-for-bit (checked in tests/test_kernels.cpp).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace qdm::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;

  // c[m x n] = a[m x k] * b[k x n], all row-major, c must not alias a or b.
  void (*cmatmul)(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k,
                  std::size_t n);

  // y[i] += alpha * x[i]
  void (*caxpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);

  // out[side x side] = mean of each block x block tile of in[side x side],
  // broadcast back over the tile. block must divide side.
  void (*block_average)(const double* in, double* out, std::size_t side, std::size_t block);

  // dst[i] = src[index[i]]
  void (*gather)(const double* src, const std::uint32_t* index, double* dst, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// Null when the build or the CPU lacks AVX2.
const KernelTable* avx2_table() noexcept;

/// Table used by the library. Defaults to the best ISA the CPU supports.
const KernelTable& active() noexcept;

/// Pin the dispatch (tests and benchmarks). Returns false if unsupported.
bool force_isa(Isa isa) noexcept;

/// Restore CPU-based selection.
void reset_isa() noexcept;

std::string_view isa_name(Isa isa) noexcept;

}  // namespace qdm::kernels
