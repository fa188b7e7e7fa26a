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

#include "qdm/kernels/kernels.hpp"

namespace qdm::kernels::detail {

void cmatmul_scalar(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k,
                    std::size_t n);
void caxpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void block_average_scalar(const double* in, double* out, std::size_t side, std::size_t block);
void gather_scalar(const double* src, const std::uint32_t* index, double* dst, std::size_t n);

#ifdef QDM_HAVE_AVX2
void cmatmul_avx2(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k,
                  std::size_t n);
void caxpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void block_average_avx2(const double* in, double* out, std::size_t side, std::size_t block);
void gather_avx2(const double* src, const std::uint32_t* index, double* dst, std::size_t n);
#endif

}  // namespace qdm::kernels::detail
