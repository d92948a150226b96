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

#include <cmath>

#include "mrea/simd/kernels.hpp"

namespace mrea::simd::detail {
namespace {

void subtract_scaled(double* dst, const double* src, double factor,
                     std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) dst[k] = dst[k] - factor * src[k];
}

void divide(double* dst, double divisor, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) dst[k] = dst[k] / divisor;
}

void evaluate_actions(const ActionEvalArgs& args, double* total_out,
                      double* x_out) {
  const int last = static_cast<int>(args.n_grid) - 2;
  for (std::size_t a = 0; a < args.n_actions; ++a) {
    // Mirrors _mm256_max_pd / _mm256_min_pd operand semantics.
    double x = args.actions[a] > args.lower ? args.actions[a] : args.lower;
    x = x < args.upper ? x : args.upper;
    const double cost = x > 0.0 ? args.buy_slope * x : args.sell_slope * x;
    const double s = args.state + x;
    const double pos = (s - args.grid_origin) * args.inv_step;
    int idx = static_cast<int>(std::floor(pos));
    idx = idx > 0 ? idx : 0;
    idx = idx < last ? idx : last;
    const double g0 = args.grid[idx];
    const double g1 = args.grid[idx + 1];
    const double f = (s - g0) / (g1 - g0);
    const double v = (1.0 - f) * args.values[idx] + f * args.values[idx + 1];
    x_out[a] = x;
    total_out[a] = cost + v;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::kScalar, &subtract_scaled, &divide,
                                 &evaluate_actions};
  return table;
}

}  // namespace mrea::simd::detail
