#pragma once

#include <cstddef>

// Low level complex kernels.  Every kernel has a scalar reference
// implementation and may have SIMD variants (AVX2+FMA on x86-64, NEON on
// aarch64).  The active variant is chosen once at runtime from CPU
// capabilities; tests pin each variant explicitly and compare results.
//
// All arrays are interleaved complex doubles ([re, im] pairs), matching the
// guaranteed layout of std::complex<double>.

namespace bqds::kernels {

enum class Isa { Scalar, Avx2, Neon };

// Variant currently used by the dispatched entry points.
Isa active_isa();
// Highest variant this CPU supports.
Isa detected_isa();
// Pin a variant (tests only).  Requesting an unsupported variant is an error.
void force_isa(Isa isa);
// Return to auto-detection.
void reset_isa();

// C += A * B with A m-by-k, B k-by-n, C m-by-n, all row-major complex.
void zgemm_acc(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n);
// out = sum_i conj(x_i) * y_i
void zdotc(const double* x, const double* y, std::size_t len, double out[2]);
// y += alpha * x
void zaxpy(const double alpha[2], const double* x, double* y, std::size_t len);
// sum_i |x_i|^2
double znrm2sq(const double* x, std::size_t len);

namespace detail {
// Per-variant entry points, exposed for equivalence tests.
void zgemm_acc_scalar(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n);
void zdotc_scalar(const double* x, const double* y, std::size_t len,
                  double out[2]);
void zaxpy_scalar(const double alpha[2], const double* x, double* y,
                  std::size_t len);
double znrm2sq_scalar(const double* x, std::size_t len);

#if defined(__x86_64__) || defined(_M_X64)
void zgemm_acc_avx2(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n);
void zdotc_avx2(const double* x, const double* y, std::size_t len,
                double out[2]);
void zaxpy_avx2(const double alpha[2], const double* x, double* y,
                std::size_t len);
double znrm2sq_avx2(const double* x, std::size_t len);
#endif

#if defined(__aarch64__)
void zgemm_acc_neon(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n);
void zdotc_neon(const double* x, const double* y, std::size_t len,
                double out[2]);
void zaxpy_neon(const double alpha[2], const double* x, double* y,
                std::size_t len);
double znrm2sq_neon(const double* x, std::size_t len);
#endif
}  // namespace detail

}  // namespace bqds::kernels
