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

#include <immintrin.h>

#include <vector>

#include "kernels_impl.hpp"

namespace qdm::kernels::detail {

namespace {

// (ar + i ai) * (x0, x1) for two interleaved complex values in v.
// addsub yields (ar*br - ai*bi, ar*bi + ai*br), the scalar formula term for term.
inline __m256d cmul_broadcast(__m256d ar, __m256d ai, __m256d v) {
  const __m256d swapped = _mm256_permute_pd(v, 0b0101);
  return _mm256_addsub_pd(_mm256_mul_pd(ar, v), _mm256_mul_pd(ai, swapped));
}

}  // namespace

void cmatmul_avx2(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k,
                  std::size_t n) {
  const double* bd = reinterpret_cast<const double*>(b);
  double* cd = reinterpret_cast<double*>(c);
  const std::size_t n2 = n & ~std::size_t{1};
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = cd + 2 * i * n;
    for (std::size_t j = 0; j < 2 * n; ++j) crow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double ar = a[i * k + p].real();
      const double ai = a[i * k + p].imag();
      const __m256d var = _mm256_set1_pd(ar);
      const __m256d vai = _mm256_set1_pd(ai);
      const double* brow = bd + 2 * p * n;
      std::size_t j = 0;
      for (; j < n2; j += 2) {
        const __m256d vb = _mm256_loadu_pd(brow + 2 * j);
        const __m256d vc = _mm256_loadu_pd(crow + 2 * j);
        _mm256_storeu_pd(crow + 2 * j, _mm256_add_pd(vc, cmul_broadcast(var, vai, vb)));
      }
      for (; j < n; ++j) {
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

void caxpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double ar = alpha.real();
  const double ai = alpha.imag();
  const __m256d var = _mm256_set1_pd(ar);
  const __m256d vai = _mm256_set1_pd(ai);
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * j);
    const __m256d vy = _mm256_loadu_pd(yd + 2 * j);
    _mm256_storeu_pd(yd + 2 * j, _mm256_add_pd(vy, cmul_broadcast(var, vai, vx)));
  }
  for (; j < n; ++j) {
    const double xr = xd[2 * j];
    const double xi = xd[2 * j + 1];
    const double pr = ar * xr - ai * xi;
    const double pi = ar * xi + ai * xr;
    yd[2 * j] += pr;
    yd[2 * j + 1] += pi;
  }
}

void block_average_avx2(const double* in, double* out, std::size_t side, std::size_t block) {
  std::vector<double> colsum(side);
  const double cells = static_cast<double>(block * block);
  const std::size_t side4 = side & ~std::size_t{3};
  for (std::size_t r0 = 0; r0 < side; r0 += block) {
    std::size_t c = 0;
    for (; c < side4; c += 4) {
      __m256d acc = _mm256_loadu_pd(in + r0 * side + c);
      for (std::size_t r = r0 + 1; r < r0 + block; ++r)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(in + r * side + c));
      _mm256_storeu_pd(colsum.data() + c, acc);
    }
    for (; c < side; ++c) {
      double acc = in[r0 * side + c];
      for (std::size_t r = r0 + 1; r < r0 + block; ++r) acc += in[r * side + c];
      colsum[c] = acc;
    }
    for (std::size_t c0 = 0; c0 < side; c0 += block) {
      double s = colsum[c0];
      for (std::size_t cc = c0 + 1; cc < c0 + block; ++cc) s += colsum[cc];
      const double mean = s / cells;
      const __m256d vmean = _mm256_set1_pd(mean);
      for (std::size_t r = r0; r < r0 + block; ++r) {
        double* row = out + r * side;
        std::size_t cc = c0;
        for (; cc + 4 <= c0 + block; cc += 4) _mm256_storeu_pd(row + cc, vmean);
        for (; cc < c0 + block; ++cc) row[cc] = mean;
      }
    }
  }
}

void gather_avx2(const double* src, const std::uint32_t* index, double* dst, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(index + i));
    _mm256_storeu_pd(dst + i, _mm256_i32gather_pd(src, idx, 8));
  }
  for (; i < n; ++i) dst[i] = src[index[i]];
}

}  // namespace qdm::kernels::detail
