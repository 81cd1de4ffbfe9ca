#include "bqds/kernels.hpp"

namespace bqds::kernels::detail {

void zgemm_acc_scalar(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      const double ar = a[2 * (i * k + l)];
      const double ai = a[2 * (i * k + l) + 1];
      if (ar == 0.0 && ai == 0.0) continue;
      const double* brow = b + 2 * l * n;
      double* crow = c + 2 * i * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double br = brow[2 * j];
        const double bi = brow[2 * j + 1];
        crow[2 * j] += ar * br - ai * bi;
        crow[2 * j + 1] += ar * bi + ai * br;
      }
    }
  }
}

void zdotc_scalar(const double* x, const double* y, std::size_t len,
                  double out[2]) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    const double yr = y[2 * i], yi = y[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  out[0] = re;
  out[1] = im;
}

void zaxpy_scalar(const double alpha[2], const double* x, double* y,
                  std::size_t len) {
  const double ar = alpha[0], ai = alpha[1];
  for (std::size_t i = 0; i < len; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    y[2 * i] += ar * xr - ai * xi;
    y[2 * i + 1] += ar * xi + ai * xr;
  }
}

double znrm2sq_scalar(const double* x, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 2 * len; ++i) acc += x[i] * x[i];
  return acc;
}

}  // namespace bqds::kernels::detail
