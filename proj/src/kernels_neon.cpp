// NEON variants for aarch64, where one float64x2_t holds one complex double.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "bqds/kernels.hpp"

namespace bqds::kernels::detail {

namespace {
// (re, im) -> (im, re)
inline float64x2_t swap_pair(float64x2_t v) { return vextq_f64(v, v, 1); }
}  // namespace

void zgemm_acc_neon(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n) {
  const float64x2_t sign = {1.0, -1.0};
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + 2 * i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const double ar = a[2 * (i * k + l)];
      const double ai = a[2 * (i * k + l) + 1];
      if (ar == 0.0 && ai == 0.0) continue;
      const float64x2_t var = vdupq_n_f64(ar);
      // (-ai, ai): lane 0 carries the sign for the real part
      const float64x2_t vai = vmulq_f64(vdupq_n_f64(ai), vnegq_f64(sign));
      const double* brow = b + 2 * l * n;
      for (std::size_t j = 0; j < n; ++j) {
        const float64x2_t vb = vld1q_f64(brow + 2 * j);
        float64x2_t acc = vld1q_f64(crow + 2 * j);
        // acc += (ar*br - ai*bi, ar*bi + ai*br)
        acc = vfmaq_f64(acc, var, vb);
        acc = vfmaq_f64(acc, vai, swap_pair(vb));
        vst1q_f64(crow + 2 * j, acc);
      }
    }
  }
}

void zdotc_neon(const double* x, const double* y, std::size_t len,
                double out[2]) {
  const float64x2_t sign = {1.0, -1.0};
  float64x2_t racc = vdupq_n_f64(0.0);
  float64x2_t iacc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < len; ++i) {
    const float64x2_t vx = vld1q_f64(x + 2 * i);
    const float64x2_t vy = vld1q_f64(y + 2 * i);
    // re: xr*yr + xi*yi
    racc = vfmaq_f64(racc, vx, vy);
    // im: xr*yi - xi*yr
    iacc = vfmaq_f64(iacc, vx, vmulq_f64(swap_pair(vy), sign));
  }
  out[0] = vaddvq_f64(racc);
  out[1] = vaddvq_f64(iacc);
}

void zaxpy_neon(const double alpha[2], const double* x, double* y,
                std::size_t len) {
  const float64x2_t sign = {1.0, -1.0};
  const float64x2_t var = vdupq_n_f64(alpha[0]);
  const float64x2_t vai = vmulq_f64(vdupq_n_f64(alpha[1]), vnegq_f64(sign));
  for (std::size_t i = 0; i < len; ++i) {
    const float64x2_t vx = vld1q_f64(x + 2 * i);
    float64x2_t acc = vld1q_f64(y + 2 * i);
    acc = vfmaq_f64(acc, var, vx);
    acc = vfmaq_f64(acc, vai, swap_pair(vx));
    vst1q_f64(y + 2 * i, acc);
  }
}

double znrm2sq_neon(const double* x, std::size_t len) {
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < len; ++i) {
    const float64x2_t v = vld1q_f64(x + 2 * i);
    acc = vfmaq_f64(acc, v, v);
  }
  return vaddvq_f64(acc);
}

}  // namespace bqds::kernels::detail

#endif  // __aarch64__
