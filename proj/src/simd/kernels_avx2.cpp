// Copyright 2026 The mrea Authors.
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

// Compiled with -mavx2 only; callers reach these through the dispatch table
// after a CPU feature check.

#include <immintrin.h>

#include <cmath>

#include "mrea/simd/kernels.hpp"

namespace mrea::simd::detail {
namespace {

void subtract_scaled(double* dst, const double* src, double factor,
                     std::size_t n) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_loadu_pd(dst + k);
    const __m256d s = _mm256_loadu_pd(src + k);
    _mm256_storeu_pd(dst + k, _mm256_sub_pd(d, _mm256_mul_pd(f, s)));
  }
  for (; k < n; ++k) dst[k] = dst[k] - factor * src[k];
}

void divide(double* dst, double divisor, std::size_t n) {
  const __m256d d = _mm256_set1_pd(divisor);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(dst + k, _mm256_div_pd(_mm256_loadu_pd(dst + k), d));
  }
  for (; k < n; ++k) dst[k] = dst[k] / divisor;
}

void evaluate_actions(const ActionEvalArgs& args, double* total_out,
                      double* x_out) {
  const int last = static_cast<int>(args.n_grid) - 2;
  const __m256d lower = _mm256_set1_pd(args.lower);
  const __m256d upper = _mm256_set1_pd(args.upper);
  const __m256d buy = _mm256_set1_pd(args.buy_slope);
  const __m256d sell = _mm256_set1_pd(args.sell_slope);
  const __m256d state = _mm256_set1_pd(args.state);
  const __m256d origin = _mm256_set1_pd(args.grid_origin);
  const __m256d inv_step = _mm256_set1_pd(args.inv_step);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m128i idx_lo = _mm_setzero_si128();
  const __m128i idx_hi = _mm_set1_epi32(last);
  const __m128i idx_one = _mm_set1_epi32(1);

  std::size_t a = 0;
  for (; a + 4 <= args.n_actions; a += 4) {
    __m256d x = _mm256_max_pd(_mm256_loadu_pd(args.actions + a), lower);
    x = _mm256_min_pd(x, upper);
    const __m256d charging = _mm256_cmp_pd(x, zero, _CMP_GT_OQ);
    const __m256d cost = _mm256_blendv_pd(_mm256_mul_pd(sell, x),
                                          _mm256_mul_pd(buy, x), charging);
    const __m256d s = _mm256_add_pd(state, x);
    const __m256d pos = _mm256_mul_pd(_mm256_sub_pd(s, origin), inv_step);
    __m128i idx = _mm256_cvttpd_epi32(_mm256_floor_pd(pos));
    idx = _mm_min_epi32(_mm_max_epi32(idx, idx_lo), idx_hi);
    const __m128i idx1 = _mm_add_epi32(idx, idx_one);
    const __m256d g0 = _mm256_i32gather_pd(args.grid, idx, 8);
    const __m256d g1 = _mm256_i32gather_pd(args.grid, idx1, 8);
    const __m256d v0 = _mm256_i32gather_pd(args.values, idx, 8);
    const __m256d v1 = _mm256_i32gather_pd(args.values, idx1, 8);
    const __m256d f = _mm256_div_pd(_mm256_sub_pd(s, g0), _mm256_sub_pd(g1, g0));
    const __m256d v = _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(one, f), v0),
                                    _mm256_mul_pd(f, v1));
    _mm256_storeu_pd(x_out + a, x);
    _mm256_storeu_pd(total_out + a, _mm256_add_pd(cost, v));
  }
  if (a < args.n_actions) {
    ActionEvalArgs tail = args;
    tail.actions = args.actions + a;
    tail.n_actions = args.n_actions - a;
    scalar_table().evaluate_actions(tail, total_out + a, x_out + a);
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::kAvx2, &subtract_scaled, &divide,
                                 &evaluate_actions};
  return table;
}

}  // namespace mrea::simd::detail
