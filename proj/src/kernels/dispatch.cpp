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

#include <atomic>

#include "kernels_impl.hpp"

namespace qdm::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &detail::cmatmul_scalar, &detail::caxpy_scalar,
                              &detail::block_average_scalar, &detail::gather_scalar};

#ifdef QDM_HAVE_AVX2
constexpr KernelTable kAvx2{Isa::avx2, &detail::cmatmul_avx2, &detail::caxpy_avx2,
                            &detail::block_average_avx2, &detail::gather_avx2};

bool cpu_has_avx2() noexcept {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}
#endif

const KernelTable* detect() noexcept {
  if (const KernelTable* t = avx2_table()) return t;
  return &kScalar;
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#ifdef QDM_HAVE_AVX2
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return nullptr;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

bool force_isa(Isa isa) noexcept {
  const KernelTable* t = isa == Isa::scalar ? &kScalar : avx2_table();
  if (t == nullptr) return false;
  current().store(t, std::memory_order_relaxed);
  return true;
}

void reset_isa() noexcept { current().store(detect(), std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace qdm::kernels
