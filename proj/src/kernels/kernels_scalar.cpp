#include "hjr/kernels.hpp"

namespace hjr::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double* out, const double* x, const double* v, double alpha, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = x[i] + alpha * v[i];
}

void sym_multi_matvec_scalar(double* out, const double* a, std::size_t n, const double* rows, std::size_t ldr,
                             std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    const double* r = rows + k * ldr;
    double* o = out + k * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double* ai = a + i * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += ai[j] * r[j];
      o[i] = acc;
    }
  }
}

void rank_update_scalar(double* c, const double* b, std::size_t n, const double* left, const double* right,
                        std::size_t count, bool upper_only) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = upper_only ? i : 0;
    double* ci = c + i * n;
    const double* bi = b + i * n;
    for (std::size_t j = j0; j < n; ++j) {
      double acc = bi[j];
      for (std::size_t k = 0; k < count; ++k) acc += left[k * n + i] * right[k * n + j];
      ci[j] = acc;
    }
    if (upper_only) {
      for (std::size_t j = i + 1; j < n; ++j) c[j * n + i] = ci[j];
    }
  }
}

} // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, "scalar", dot_scalar, axpy_scalar, sym_multi_matvec_scalar,
                                 rank_update_scalar};
  return table;
}

} // namespace hjr::kernels
