#include "hjr/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace hjr::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t len) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  for (; i + 2 <= len; i += 2) acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double* out, const double* x, const double* v, double alpha, std::size_t len) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) vst1q_f64(out + i, vfmaq_f64(vld1q_f64(x + i), a, vld1q_f64(v + i)));
  for (; i < len; ++i) out[i] = x[i] + alpha * v[i];
}

void sym_multi_matvec_neon(double* out, const double* a, std::size_t n, const double* rows, std::size_t ldr,
                           std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    const double* r = rows + k * ldr;
    double* o = out + k * n;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      float64x2_t acc0 = vdupq_n_f64(0.0);
      float64x2_t acc1 = vdupq_n_f64(0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const float64x2_t rj = vdupq_n_f64(r[j]);
        const double* aj = a + j * n + i;
        acc0 = vfmaq_f64(acc0, rj, vld1q_f64(aj));
        acc1 = vfmaq_f64(acc1, rj, vld1q_f64(aj + 2));
      }
      vst1q_f64(o + i, acc0);
      vst1q_f64(o + i + 2, acc1);
    }
    for (; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += r[j] * a[j * n + i];
      o[i] = acc;
    }
  }
}

void rank_update_neon(double* c, const double* b, std::size_t n, const double* left, const double* right,
                      std::size_t count, bool upper_only) {
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c + i * n;
    const double* bi = b + i * n;
    std::size_t j = upper_only ? i : 0;
    for (; j + 2 <= n; j += 2) {
      float64x2_t acc = vld1q_f64(bi + j);
      for (std::size_t k = 0; k < count; ++k) {
        acc = vfmaq_f64(acc, vdupq_n_f64(left[k * n + i]), vld1q_f64(right + k * n + j));
      }
      vst1q_f64(ci + j, acc);
    }
    for (; j < n; ++j) {
      double acc = bi[j];
      for (std::size_t k = 0; k < count; ++k) acc += left[k * n + i] * right[k * n + j];
      ci[j] = acc;
    }
    if (upper_only) {
      for (std::size_t jj = i + 1; jj < n; ++jj) c[jj * n + i] = ci[jj];
    }
  }
}

} // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{Isa::neon, "neon", dot_neon, axpy_neon, sym_multi_matvec_neon,
                                 rank_update_neon};
  return &table;
}

} // namespace hjr::kernels

#else

namespace hjr::kernels {
const KernelTable* neon_kernels() { return nullptr; }
} // namespace hjr::kernels

#endif
