// AVX2+FMA variants.  Compiled with -mavx2 -mfma on x86-64 only; the
// dispatcher never selects them unless the CPU reports both features.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "bqds/kernels.hpp"

namespace bqds::kernels::detail {

namespace {
// [re, im, re, im] -> [im, re, im, re] within each 128-bit half.
inline __m256d swap_pairs(__m256d v) { return _mm256_permute_pd(v, 0x5); }
}  // namespace

void zgemm_acc_avx2(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n) {
  const std::size_t nv = n / 2 * 2;  // complex pairs handled vectorized
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + 2 * i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const double ar = a[2 * (i * k + l)];
      const double ai = a[2 * (i * k + l) + 1];
      if (ar == 0.0 && ai == 0.0) continue;
      const __m256d var = _mm256_set1_pd(ar);
      const __m256d vai = _mm256_set1_pd(ai);
      const double* brow = b + 2 * l * n;
      std::size_t j = 0;
      for (; j < nv; j += 2) {
        const __m256d vb = _mm256_loadu_pd(brow + 2 * j);
        const __m256d t = _mm256_mul_pd(vai, swap_pairs(vb));
        // even lanes: ar*br - ai*bi, odd lanes: ar*bi + ai*br
        const __m256d prod = _mm256_fmaddsub_pd(var, vb, t);
        const __m256d acc = _mm256_loadu_pd(crow + 2 * j);
        _mm256_storeu_pd(crow + 2 * j, _mm256_add_pd(acc, prod));
      }
      for (; j < n; ++j) {
        const double br = brow[2 * j], bi = brow[2 * j + 1];
        crow[2 * j] += ar * br - ai * bi;
        crow[2 * j + 1] += ar * bi + ai * br;
      }
    }
  }
}

void zdotc_avx2(const double* x, const double* y, std::size_t len,
                double out[2]) {
  const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
  __m256d racc = _mm256_setzero_pd();
  __m256d iacc = _mm256_setzero_pd();
  const std::size_t lv = len / 2 * 2;
  std::size_t i = 0;
  for (; i < lv; i += 2) {
    const __m256d vx = _mm256_loadu_pd(x + 2 * i);
    const __m256d vy = _mm256_loadu_pd(y + 2 * i);
    // re: sum xr*yr + xi*yi over raw lanes
    racc = _mm256_fmadd_pd(vx, vy, racc);
    // im: sum xr*yi - xi*yr; negate odd lanes of the swapped y
    iacc = _mm256_fmadd_pd(vx, _mm256_mul_pd(swap_pairs(vy), sign), iacc);
  }
  alignas(32) double rbuf[4], ibuf[4];
  _mm256_store_pd(rbuf, racc);
  _mm256_store_pd(ibuf, iacc);
  double re = rbuf[0] + rbuf[1] + rbuf[2] + rbuf[3];
  double im = ibuf[0] + ibuf[1] + ibuf[2] + ibuf[3];
  for (; i < len; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    const double yr = y[2 * i], yi = y[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  out[0] = re;
  out[1] = im;
}

void zaxpy_avx2(const double alpha[2], const double* x, double* y,
                std::size_t len) {
  const double ar = alpha[0], ai = alpha[1];
  const __m256d var = _mm256_set1_pd(ar);
  const __m256d vai = _mm256_set1_pd(ai);
  const std::size_t lv = len / 2 * 2;
  std::size_t i = 0;
  for (; i < lv; i += 2) {
    const __m256d vx = _mm256_loadu_pd(x + 2 * i);
    const __m256d t = _mm256_mul_pd(vai, swap_pairs(vx));
    const __m256d prod = _mm256_fmaddsub_pd(var, vx, t);
    const __m256d acc = _mm256_loadu_pd(y + 2 * i);
    _mm256_storeu_pd(y + 2 * i, _mm256_add_pd(acc, prod));
  }
  for (; i < len; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    y[2 * i] += ar * xr - ai * xi;
    y[2 * i + 1] += ar * xi + ai * xr;
  }
}

double znrm2sq_avx2(const double* x, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t raw = 2 * len;
  const std::size_t rv = raw / 4 * 4;
  std::size_t i = 0;
  for (; i < rv; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  alignas(32) double buf[4];
  _mm256_store_pd(buf, acc);
  double s = buf[0] + buf[1] + buf[2] + buf[3];
  for (; i < raw; ++i) s += x[i] * x[i];
  return s;
}

}  // namespace bqds::kernels::detail

#endif  // x86_64
