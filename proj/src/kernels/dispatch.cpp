#include "hjr/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace hjr::kernels {
namespace {

const KernelTable* lookup(Isa isa) {
  switch (isa) {
  case Isa::scalar: return &scalar_kernels();
  case Isa::avx2: return avx2_kernels();
  case Isa::neon: return neon_kernels();
  }
  return nullptr;
}

const KernelTable* initial_choice() {
  if (const char* env = std::getenv("HJR_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa)) {
        if (const KernelTable* t = lookup(isa)) return t;
      }
    }
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  if (const KernelTable* t = neon_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> active{initial_choice()};
  return active;
}

} // namespace

const KernelTable& active_kernels() { return *slot().load(std::memory_order_acquire); }

bool set_active_kernels(Isa isa) {
  const KernelTable* t = lookup(isa);
  if (t == nullptr) return false;
  slot().store(t, std::memory_order_release);
  return true;
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const KernelTable* t = avx2_kernels()) out.push_back(t);
  if (const KernelTable* t = neon_kernels()) out.push_back(t);
  return out;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
  case Isa::scalar: return "scalar";
  case Isa::avx2: return "avx2";
  case Isa::neon: return "neon";
  }
  return "unknown";
}

} // namespace hjr::kernels
