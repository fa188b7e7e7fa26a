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

#include "kernels_impl.hpp"

#include <vector>

namespace qdm::kernels::detail {

void cmatmul_scalar(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k,
                    std::size_t n) {
  const double* bd = reinterpret_cast<const double*>(b);
  double* cd = reinterpret_cast<double*>(c);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = cd + 2 * i * n;
    for (std::size_t j = 0; j < 2 * n; ++j) crow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double ar = a[i * k + p].real();
      const double ai = a[i * k + p].imag();
      const double* brow = bd + 2 * p * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double br = brow[2 * j];
        const double bi = brow[2 * j + 1];
        const double pr = ar * br - ai * bi;
        const double pi = ar * bi + ai * br;
        crow[2 * j] += pr;
        crow[2 * j + 1] += pi;
      }
    }
  }
}

void caxpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double ar = alpha.real();
  const double ai = alpha.imag();
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  for (std::size_t j = 0; j < n; ++j) {
    const double xr = xd[2 * j];
    const double xi = xd[2 * j + 1];
    const double pr = ar * xr - ai * xi;
    const double pi = ar * xi + ai * xr;
    yd[2 * j] += pr;
    yd[2 * j + 1] += pi;
  }
}

void block_average_scalar(const double* in, double* out, std::size_t side, std::size_t block) {
  std::vector<double> colsum(side);
  const double cells = static_cast<double>(block * block);
  for (std::size_t r0 = 0; r0 < side; r0 += block) {
    for (std::size_t c = 0; c < side; ++c) colsum[c] = in[r0 * side + c];
    for (std::size_t r = r0 + 1; r < r0 + block; ++r)
      for (std::size_t c = 0; c < side; ++c) colsum[c] += in[r * side + c];
    for (std::size_t c0 = 0; c0 < side; c0 += block) {
      double s = colsum[c0];
      for (std::size_t c = c0 + 1; c < c0 + block; ++c) s += colsum[c];
      const double mean = s / cells;
      for (std::size_t r = r0; r < r0 + block; ++r)
        for (std::size_t c = c0; c < c0 + block; ++c) out[r * side + c] = mean;
    }
  }
}

void gather_scalar(const double* src, const std::uint32_t* index, double* dst, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[index[i]];
}

}  // namespace qdm::kernels::detail
