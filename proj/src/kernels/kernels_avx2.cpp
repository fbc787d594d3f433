#include "hjr/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <cmath>

namespace hjr::kernels {
namespace {

// Lane mask for the last (len % 4) elements.
inline __m256i tail_mask(std::size_t rem) {
  alignas(32) static const long long table[8] = {-1, -1, -1, -1, 0, 0, 0, 0};
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(table + 4 - rem));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= len; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  if (i < len) {
    const __m256i m = tail_mask(len - i);
    acc1 = _mm256_fmadd_pd(_mm256_maskload_pd(a + i, m), _mm256_maskload_pd(b + i, m), acc1);
  }
  return hsum(_mm256_add_pd(acc0, acc1));
}

void axpy_avx2(double* out, const double* x, const double* v, double alpha, std::size_t len) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(v + i), _mm256_loadu_pd(x + i)));
  }
  if (i < len) {
    const __m256i m = tail_mask(len - i);
    const __m256d r = _mm256_fmadd_pd(a, _mm256_maskload_pd(v + i, m), _mm256_maskload_pd(x + i, m));
    _mm256_maskstore_pd(out + i, m, r);
  }
}

// Column-accumulation form: out_k = sum_j r[j] * a[j, :], valid because a is
// symmetric. Vectorizes over the contiguous rows of a.
void sym_multi_matvec_avx2(double* out, const double* a, std::size_t n, const double* rows, std::size_t ldr,
                           std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    const double* r = rows + k * ldr;
    double* o = out + k * n;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
      __m256d acc0 = _mm256_setzero_pd();
      __m256d acc1 = _mm256_setzero_pd();
      for (std::size_t j = 0; j < n; ++j) {
        const __m256d rj = _mm256_broadcast_sd(r + j);
        const double* aj = a + j * n + i;
        acc0 = _mm256_fmadd_pd(rj, _mm256_loadu_pd(aj), acc0);
        acc1 = _mm256_fmadd_pd(rj, _mm256_loadu_pd(aj + 4), acc1);
      }
      _mm256_storeu_pd(o + i, acc0);
      _mm256_storeu_pd(o + i + 4, acc1);
    }
    for (; i + 4 <= n; i += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t j = 0; j < n; ++j) {
        acc = _mm256_fmadd_pd(_mm256_broadcast_sd(r + j), _mm256_loadu_pd(a + j * n + i), acc);
      }
      _mm256_storeu_pd(o + i, acc);
    }
    if (i < n) {
      const __m256i m = tail_mask(n - i);
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t j = 0; j < n; ++j) {
        acc = _mm256_fmadd_pd(_mm256_broadcast_sd(r + j), _mm256_maskload_pd(a + j * n + i, m), acc);
      }
      _mm256_maskstore_pd(o + i, m, acc);
    }
  }
}

void rank_update_avx2(double* c, const double* b, std::size_t n, const double* left, const double* right,
                      std::size_t count, bool upper_only) {
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c + i * n;
    const double* bi = b + i * n;
    std::size_t j = upper_only ? i : 0;
    for (; j + 4 <= n; j += 4) {
      __m256d acc = _mm256_loadu_pd(bi + j);
      for (std::size_t k = 0; k < count; ++k) {
        acc = _mm256_fmadd_pd(_mm256_broadcast_sd(left + k * n + i), _mm256_loadu_pd(right + k * n + j), acc);
      }
      _mm256_storeu_pd(ci + j, acc);
    }
    for (; j < n; ++j) {
      double acc = bi[j];
      for (std::size_t k = 0; k < count; ++k) acc = std::fma(left[k * n + i], right[k * n + j], acc);
      ci[j] = acc;
    }
    if (upper_only) {
      for (std::size_t jj = i + 1; jj < n; ++jj) c[jj * n + i] = ci[jj];
    }
  }
}

bool cpu_has_avx2_fma() {
#if defined(__GNUC__) || defined(__clang__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

} // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::avx2, "avx2", dot_avx2, axpy_avx2, sym_multi_matvec_avx2,
                                 rank_update_avx2};
  static const bool supported = cpu_has_avx2_fma();
  return supported ? &table : nullptr;
}

} // namespace hjr::kernels

#else

namespace hjr::kernels {
const KernelTable* avx2_kernels() { return nullptr; }
} // namespace hjr::kernels

#endif
