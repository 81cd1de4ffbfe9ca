#include "bqds/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace bqds::kernels {

namespace {

Isa detect() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Isa::Avx2;
  return Isa::Scalar;
#elif defined(__aarch64__)
  return Isa::Neon;
#else
  return Isa::Scalar;
#endif
}

std::atomic<Isa> g_active{detect()};

}  // namespace

Isa detected_isa() { return detect(); }

Isa active_isa() { return g_active.load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa != Isa::Scalar && isa != detect())
    throw std::runtime_error("kernels: requested ISA not supported here");
  g_active.store(isa, std::memory_order_relaxed);
}

void reset_isa() { g_active.store(detect(), std::memory_order_relaxed); }

void zgemm_acc(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
      return detail::zgemm_acc_avx2(a, b, c, m, k, n);
#endif
#if defined(__aarch64__)
    case Isa::Neon:
      return detail::zgemm_acc_neon(a, b, c, m, k, n);
#endif
    default:
      return detail::zgemm_acc_scalar(a, b, c, m, k, n);
  }
}

void zdotc(const double* x, const double* y, std::size_t len, double out[2]) {
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
      return detail::zdotc_avx2(x, y, len, out);
#endif
#if defined(__aarch64__)
    case Isa::Neon:
      return detail::zdotc_neon(x, y, len, out);
#endif
    default:
      return detail::zdotc_scalar(x, y, len, out);
  }
}

void zaxpy(const double alpha[2], const double* x, double* y,
           std::size_t len) {
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
      return detail::zaxpy_avx2(alpha, x, y, len);
#endif
#if defined(__aarch64__)
    case Isa::Neon:
      return detail::zaxpy_neon(alpha, x, y, len);
#endif
    default:
      return detail::zaxpy_scalar(alpha, x, y, len);
  }
}

double znrm2sq(const double* x, std::size_t len) {
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
      return detail::znrm2sq_avx2(x, len);
#endif
#if defined(__aarch64__)
    case Isa::Neon:
      return detail::znrm2sq_neon(x, len);
#endif
    default:
      return detail::znrm2sq_scalar(x, len);
  }
}

}  // namespace bqds::kernels
