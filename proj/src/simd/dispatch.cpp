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

#include <atomic>
#include <cstdlib>
#include <string>

#include <spdlog/spdlog.h>

#include "mrea/errors.hpp"
#include "mrea/simd/kernels.hpp"

namespace mrea::simd {
namespace {

bool cpu_has_avx2() {
#if defined(MREA_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  const char* env = std::getenv("MREA_SIMD");
  if (env != nullptr) {
    const std::string requested(env);
    if (requested == "scalar") return Isa::kScalar;
    if (requested == "avx2") {
      if (cpu_has_avx2()) return Isa::kAvx2;
      spdlog::warn("MREA_SIMD=avx2 requested but unavailable; using scalar");
      return Isa::kScalar;
    }
    if (requested != "auto") {
      spdlog::warn("ignoring unknown MREA_SIMD value '{}'", requested);
    }
  }
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  return isa == Isa::kScalar || (isa == Isa::kAvx2 && cpu_has_avx2());
}

const KernelTable& kernels_for(Isa isa) {
  if (isa == Isa::kScalar) return detail::scalar_table();
#if defined(MREA_HAVE_AVX2)
  if (isa == Isa::kAvx2 && cpu_has_avx2()) return detail::avx2_table();
#endif
  throw InvalidArgument("SIMD variant '" + std::string(isa_name(isa)) +
                        "' is not available on this build or CPU");
}

const KernelTable& kernels() { return kernels_for(active().load()); }

Isa active_isa() { return active().load(); }

void set_active_isa(Isa isa) {
  kernels_for(isa);  // validates
  active().store(isa);
}

}  // namespace mrea::simd
