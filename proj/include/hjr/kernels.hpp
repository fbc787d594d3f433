#pragma once

// Dense inner loops of the Riccati integrator.
//
// Every kernel has a portable scalar reference and, where the target allows,
// AVX2+FMA (x86-64) and NEON (aarch64) variants. The active table is picked
// once at first use from the CPU's capabilities; HJR_SIMD=scalar|avx2|neon in
// the environment or set_active_kernels() override the choice.
//
// Layout conventions: matrices are row-major with an explicit leading
// dimension. All pointers must be valid for the stated extents; aliasing is
// allowed only where noted.

#include <cstddef>
#include <string_view>
#include <vector>

namespace hjr::kernels {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  const char* name;

  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t len);

  /// out[i] = x[i] + alpha * v[i]. out may alias x.
  void (*axpy)(double* out, const double* x, const double* v, double alpha, std::size_t len);

  /// out[k*n + i] = sum_j a[i*n + j] * rows[k*ldr + j] for k < count, i < n.
  /// With a symmetric, row k of out is a * rows_k.
  void (*sym_multi_matvec)(double* out, const double* a, std::size_t n, const double* rows, std::size_t ldr,
                           std::size_t count);

  /// c[i*n + j] = b[i*n + j] + sum_k left[k*n + i] * right[k*n + j].
  /// With upper_only, only j >= i is computed and then mirrored to (j, i);
  /// use it when the update is symmetric. c may alias b.
  void (*rank_update)(double* c, const double* b, std::size_t n, const double* left, const double* right,
                      std::size_t count, bool upper_only);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Kernels in use by the integrator.
const KernelTable& active_kernels();
/// Force a variant; returns false (and changes nothing) if unavailable.
bool set_active_kernels(Isa isa);
/// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

std::string_view isa_name(Isa isa);

} // namespace hjr::kernels
