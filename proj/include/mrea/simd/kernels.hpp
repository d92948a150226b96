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

#ifndef MREA_SIMD_KERNELS_HPP_
#define MREA_SIMD_KERNELS_HPP_

#include <cstddef>
#include <string_view>

// Data-parallel inner loops shared by the dense simplex and the DP oracle.
//
// Every kernel has a scalar reference implementation and an AVX2 variant.
// The variants are written to be bitwise identical to the reference: same
// operation order, no fused multiply-add, and the same min/max/select
// semantics. The active table is chosen once at startup from CPU features
// and can be overridden with MREA_SIMD=scalar|avx2 or set_active_isa().

namespace mrea::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// Inputs for evaluating every DP action from one state.
//
// For each candidate a the kernel clips x = clamp(actions[a], lower, upper),
// prices it with the piecewise cost (buy_slope * x when charging, sell_slope
// * x otherwise) and adds the linearly interpolated value of the next stage
// at state + x.
struct ActionEvalArgs {
  double state = 0.0;
  const double* actions = nullptr;
  std::size_t n_actions = 0;
  double lower = 0.0;  // b_min - state
  double upper = 0.0;  // b_max - state
  double buy_slope = 0.0;
  double sell_slope = 0.0;
  const double* grid = nullptr;    // state coordinates, ascending
  const double* values = nullptr;  // next-stage value on `grid`
  std::size_t n_grid = 0;          // >= 2
  double grid_origin = 0.0;
  double inv_step = 1.0;  // 1 / regular grid spacing
};

struct KernelTable {
  Isa isa;
  // dst[k] = dst[k] - factor * src[k]
  void (*subtract_scaled)(double* dst, const double* src, double factor,
                          std::size_t n);
  // dst[k] = dst[k] / divisor
  void (*divide)(double* dst, double divisor, std::size_t n);
  // Writes the clipped action to x_out[a] and its total to total_out[a].
  void (*evaluate_actions)(const ActionEvalArgs& args, double* total_out,
                           double* x_out);
};

bool isa_supported(Isa isa);

// Throws InvalidArgument when the ISA is not compiled in or not supported by
// the running CPU.
const KernelTable& kernels_for(Isa isa);

const KernelTable& kernels();
Isa active_isa();
void set_active_isa(Isa isa);

// Restores the previous ISA on destruction. Not thread-safe; intended for
// tests and benchmarks.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
  ~ScopedIsa() { set_active_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

namespace detail {
const KernelTable& scalar_table();
#if defined(MREA_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace mrea::simd

#endif  // MREA_SIMD_KERNELS_HPP_
