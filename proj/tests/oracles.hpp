// Independent reference implementations used to cross-check library results.
// Everything here is deliberately naive: plain loops, no shared code paths
// with the library beyond the CMatrix container itself.
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "bqds/cmatrix.hpp"

namespace oracles {

using bqds::CMatrix;
using cplx = std::complex<double>;

// Triple-loop matrix product. Used as the ground truth for kernel tests,
// so it must not call into the dispatched multiply.
inline CMatrix naive_mul(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

inline CMatrix naive_adjoint(const CMatrix& a) {
  CMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

// Rank via Gaussian elimination with partial pivoting on a working copy.
inline std::size_t ge_rank(CMatrix m, double tol = 1e-10) {
  const std::size_t rows = m.rows(), cols = m.cols();
  double scale = 0.0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) scale = std::max(scale, std::abs(m(i, j)));
  if (scale == 0.0) return 0;
  const double cut = tol * scale;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < rows; ++r)
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    if (std::abs(m(pivot, col)) <= cut) continue;
    if (pivot != rank)
      for (std::size_t j = 0; j < cols; ++j) std::swap(m(pivot, j), m(rank, j));
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const cplx f = m(r, col) / m(rank, col);
      for (std::size_t j = col; j < cols; ++j) m(r, j) -= f * m(rank, j);
    }
    ++rank;
  }
  return rank;
}

// Characteristic polynomial coefficients by the Faddeev-LeVerrier recursion.
// Returns c such that det(lambda I - A) = lambda^n + c[0] lambda^{n-1} + ... + c[n-1].
inline std::vector<cplx> char_poly(const CMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<cplx> c(n);
  CMatrix m = a;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k > 1) {
      CMatrix shifted = m;
      for (std::size_t i = 0; i < n; ++i) shifted(i, i) += c[k - 2];
      m = naive_mul(a, shifted);
    }
    c[k - 1] = -m.trace() / static_cast<double>(k);
  }
  return c;
}

inline cplx eval_char_poly(const std::vector<cplx>& c, cplx lambda) {
  cplx acc = 1.0;
  for (const cplx& ck : c) acc = acc * lambda + ck;
  return acc;
}

// Matrix exponential exp(t A) by classical RK4 on X' = A X, X(0) = I.
inline CMatrix expm_ode(const CMatrix& a, double t, int steps = 4000) {
  const std::size_t n = a.rows();
  CMatrix x = CMatrix::identity(n);
  const double h = t / steps;
  for (int s = 0; s < steps; ++s) {
    CMatrix k1 = naive_mul(a, x);
    CMatrix x2 = x;
    x2 += (h / 2) * k1;
    CMatrix k2 = naive_mul(a, x2);
    CMatrix x3 = x;
    x3 += (h / 2) * k2;
    CMatrix k3 = naive_mul(a, x3);
    CMatrix x4 = x;
    x4 += h * k3;
    CMatrix k4 = naive_mul(a, x4);
    CMatrix incr = k1;
    incr += 2.0 * k2;
    incr += 2.0 * k3;
    incr += k4;
    x += (h / 6) * incr;
  }
  return x;
}

// Largest singular value by power iteration on M* M.
inline double power_norm(const CMatrix& m, int iters = 600) {
  if (m.size() == 0) return 0.0;
  CMatrix gram = naive_mul(naive_adjoint(m), m);
  const std::size_t n = gram.rows();
  CMatrix v(n, 1);
  for (std::size_t i = 0; i < n; ++i) v(i, 0) = cplx(1.0 + 0.091 * i, 0.37 - 0.021 * i);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    CMatrix w = naive_mul(gram, v);
    const double norm = w.frobenius_norm();
    if (norm == 0.0) return 0.0;
    v = (1.0 / norm) * w;
    lambda = norm;
  }
  return std::sqrt(lambda);
}

// Smallest eigenvalue of a Hermitian matrix with its eigenvector, by power
// iteration on sigma I - C where sigma dominates the spectrum.
struct BottomEig {
  double value = 0.0;
  CMatrix vector;
};

inline BottomEig bottom_eig(const CMatrix& c, int iters = 2000) {
  const std::size_t n = c.rows();
  double sigma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(c(i, j));
    sigma = std::max(sigma, row);
  }
  CMatrix shifted = -1.0 * c;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) += sigma;
  CMatrix v(n, 1);
  for (std::size_t i = 0; i < n; ++i) v(i, 0) = cplx(0.83 - 0.07 * i, 0.4 + 0.053 * i);
  v = (1.0 / v.frobenius_norm()) * v;
  for (int it = 0; it < iters; ++it) {
    CMatrix w = naive_mul(shifted, v);
    const double norm = w.frobenius_norm();
    if (norm == 0.0) break;
    v = (1.0 / norm) * w;
  }
  CMatrix cv = naive_mul(c, v);
  cplx rayleigh = 0.0;
  for (std::size_t i = 0; i < n; ++i) rayleigh += std::conj(v(i, 0)) * cv(i, 0);
  return {rayleigh.real(), v};
}

// Heisenberg-form Kraus action computed with explicit loops.
inline CMatrix naive_kraus_apply(const std::vector<CMatrix>& kraus, const CMatrix& a) {
  const std::size_t d = kraus.front().cols();
  CMatrix out(d, d);
  for (const CMatrix& k : kraus) out += naive_mul(naive_adjoint(k), naive_mul(a, k));
  return out;
}

// Choi matrix assembled entry by entry from the action on matrix units.
inline CMatrix choi_by_definition(const std::function<CMatrix(const CMatrix&)>& apply,
                                  std::size_t n, std::size_t d) {
  CMatrix choi(n * d, n * d);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      CMatrix unit(n, n);
      unit(p, q) = 1.0;
      CMatrix img = apply(unit);
      for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y) choi(p * d + x, q * d + y) = img(x, y);
    }
  return choi;
}

// All compositions of t (ordered tuples of positive integers summing to t).
inline std::vector<std::vector<std::size_t>> compositions(std::size_t t) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t rest) {
    if (rest == 0) {
      out.push_back(cur);
      return;
    }
    for (std::size_t first = 1; first <= rest; ++first) {
      cur.push_back(first);
      rec(rest - first);
      cur.pop_back();
    }
  };
  rec(t);
  return out;
}

}  // namespace oracles
