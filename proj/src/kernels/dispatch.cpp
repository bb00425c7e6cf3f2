// Copyright 2026 The qcm Authors
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

#include "kernel_impl.hpp"
#include "qcm/errors.hpp"

namespace qcm::kernels {

namespace {

const KernelTable kScalar{
    Isa::Scalar,          "scalar",
    detail::zaxpy_scalar, detail::zaxpby_scalar,      detail::zscal_scalar,
    detail::spmm_acc_scalar, detail::adjoint_acc_scalar, detail::max_abs_diff_scalar,
};

#ifdef QCM_HAVE_AVX2_KERNELS
const KernelTable kAvx2{
    Isa::Avx2,          "avx2",
    detail::zaxpy_avx2, detail::zaxpby_avx2,      detail::zscal_avx2,
    detail::spmm_acc_avx2, detail::adjoint_acc_avx2, detail::max_abs_diff_avx2,
};
#endif

const KernelTable* best_table() {
#ifdef QCM_HAVE_AVX2_KERNELS
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{best_table()};
  return slot;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#ifdef QCM_HAVE_AVX2_KERNELS
  return &kAvx2;
#else
  return nullptr;
#endif
}

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&kScalar};
#ifdef QCM_HAVE_AVX2_KERNELS
  if (cpu_has_avx2()) out.push_back(&kAvx2);
#endif
  return out;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

void select(Isa isa) {
  for (const KernelTable* t : available_tables()) {
    if (t->isa == isa) {
      active_slot().store(t, std::memory_order_relaxed);
      return;
    }
  }
  throw DomainError("kernel ISA '" + std::string(isa_name(isa)) + "' is not available on this CPU");
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace qcm::kernels
