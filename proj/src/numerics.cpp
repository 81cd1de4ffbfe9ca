#include "bqds/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bqds {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

cplx phase_of(cplx z) {
  const double a = std::abs(z);
  return a == 0.0 ? cplx{1.0, 0.0} : z / a;
}

// Reduce a Hermitian matrix in place to real tridiagonal form, accumulating
// the unitary into q.  On return d holds the diagonal and e the (real,
// nonnegative) subdiagonal, e[i] coupling d[i] and d[i+1].
void tridiagonalize(CMatrix& a, CMatrix& q, std::vector<double>& d,
                    std::vector<double>& e) {
  const std::size_t n = a.rows();
  q = CMatrix::identity(n);
  if (n >= 3) {
    std::vector<cplx> v(n), u(n), w(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
      const std::size_t len = n - k - 1;
      double xnorm2 = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        v[i] = a(k + 1 + i, k);
        xnorm2 += std::norm(v[i]);
      }
      const double xnorm = std::sqrt(xnorm2);
      if (xnorm <= 0.0) continue;
      const cplx alpha = -phase_of(v[0]) * xnorm;
      v[0] -= alpha;
      double vnorm2 = 0.0;
      for (std::size_t i = 0; i < len; ++i) vnorm2 += std::norm(v[i]);
      if (vnorm2 <= 0.0) continue;
      const double inv = 1.0 / std::sqrt(vnorm2);
      for (std::size_t i = 0; i < len; ++i) v[i] *= inv;

      // Hermitian rank-2 update of the trailing block B = a[k+1.., k+1..]:
      // B <- B - 2 w v^* - 2 v w^*  with  w = B v - (v^* B v) v.
      for (std::size_t i = 0; i < len; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < len; ++j) s += a(k + 1 + i, k + 1 + j) * v[j];
        u[i] = s;
      }
      double kq = 0.0;
      for (std::size_t i = 0; i < len; ++i)
        kq += (std::conj(v[i]) * u[i]).real();
      for (std::size_t i = 0; i < len; ++i) w[i] = u[i] - kq * v[i];
      for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = 0; j < len; ++j)
          a(k + 1 + i, k + 1 + j) -= 2.0 * (w[i] * std::conj(v[j]) +
                                            v[i] * std::conj(w[j]));

      a(k + 1, k) = alpha;
      a(k, k + 1) = std::conj(alpha);
      for (std::size_t i = 1; i < len; ++i) {
        a(k + 1 + i, k) = 0.0;
        a(k, k + 1 + i) = 0.0;
      }

      // q <- q (I - 2 v v^*) on the trailing columns.
      for (std::size_t r = 0; r < n; ++r) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < len; ++j) s += q(r, k + 1 + j) * v[j];
        s *= 2.0;
        for (std::size_t j = 0; j < len; ++j)
          q(r, k + 1 + j) -= s * std::conj(v[j]);
      }
    }
  }

  // Phase-scale columns so the subdiagonal becomes real nonnegative.
  d.assign(n, 0.0);
  e.assign(n > 0 ? n - 1 : 0, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i).real();
  std::vector<cplx> colphase(n, cplx{1.0, 0.0});
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const cplx sub = a(i + 1, i);
    e[i] = std::abs(sub);
    colphase[i + 1] = colphase[i] * phase_of(sub);
  }
  for (std::size_t j = 1; j < n; ++j) {
    if (colphase[j] == cplx{1.0, 0.0}) continue;
    for (std::size_t r = 0; r < n; ++r) q(r, j) *= colphase[j];
  }
}

// Implicit-shift QL on a real symmetric tridiagonal, rotations accumulated
// into the (complex) columns of q.
void tql_implicit(std::vector<double>& d, std::vector<double>& e, CMatrix& q) {
  const std::size_t n = d.size();
  if (n <= 1) return;
  auto sign = [](double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); };
  e.push_back(0.0);
  // Absolute deflation floor: with a large eigenvalue cluster (projection
  // differences are mostly zeros) the neighbouring diagonals vanish and a
  // purely relative test never fires, stalling the iteration.  Deflating at
  // eps * ||T|| is a backward perturbation of the same size as the
  // representation error itself.
  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    anorm = std::max(anorm, std::fabs(d[i]) + std::fabs(e[i]));
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= kEps * std::max(dd, anorm)) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw Error(ErrorKind::NotHermitian,
                      "eigensolver failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + sign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::size_t i = m;
        bool underflow = false;
        while (i-- > l) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (std::size_t row = 0; row < q.rows(); ++row) {
            const cplx t = q(row, i + 1);
            q(row, i + 1) = s * q(row, i) + c * t;
            q(row, i) = c * q(row, i) - s * t;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  e.pop_back();
}

}  // namespace

EigResult eig_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::ShapeMismatch, "eig_hermitian: not square");
  if (!m.all_finite())
    throw Error(ErrorKind::InvalidConfig, "eig_hermitian: non-finite entries");
  const double scale = std::max(1.0, m.frobenius_norm());
  const double sym_resid = distance(m, m.adjoint());
  if (sym_resid > tol * scale)
    throw Error(ErrorKind::NotHermitian, "symmetry residual too large",
                sym_resid);

  CMatrix a = 0.5 * (m + m.adjoint());
  CMatrix q;
  std::vector<double> d, e;
  tridiagonalize(a, q, d, e);
  tql_implicit(d, e, q);

  const std::size_t n = d.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });
  EigResult out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = d[idx[j]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, j) = q(r, idx[j]);
  }
  return out;
}

PsdReport psd_check(const CMatrix& m, double tol) {
  const EigResult eg = eig_hermitian(m, tol);
  const double lmin = eg.values.empty() ? 0.0 : eg.values.back();
  return {lmin >= -tol, lmin};
}

SvdResult svd(const CMatrix& m) {
  if (m.rows() < m.cols()) {
    SvdResult t = svd(m.adjoint());
    return {std::move(t.v), std::move(t.sigma), std::move(t.u)};
  }
  const std::size_t rows = m.rows(), n = m.cols();
  CMatrix u = m;
  CMatrix v = CMatrix::identity(n);
  if (!m.all_finite())
    throw Error(ErrorKind::InvalidConfig, "svd: non-finite entries");

  auto col_dot = [&](const CMatrix& mat, std::size_t p, std::size_t q) {
    cplx s = 0.0;
    for (std::size_t r = 0; r < mat.rows(); ++r)
      s += std::conj(mat(r, p)) * mat(r, q);
    return s;
  };

  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double app = col_dot(u, p, p).real();
        const double aqq = col_dot(u, q, q).real();
        const cplx apq = col_dot(u, p, q);
        const double mag = std::abs(apq);
        if (app <= 0.0 || aqq <= 0.0) continue;
        if (mag <= 1e2 * kEps * std::sqrt(app * aqq)) continue;
        rotated = true;
        const cplx ph = phase_of(apq);  // apq = |apq| * ph
        const double zeta = (aqq - app) / (2.0 * mag);
        const double t =
            (zeta >= 0.0 ? 1.0 : -1.0) /
            (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        // Columns: p' = c p - s conj(ph) q ; q' = s p + c conj(ph) q.
        const cplx w = std::conj(ph);
        for (std::size_t r = 0; r < rows; ++r) {
          const cplx up = u(r, p), uq = u(r, q);
          u(r, p) = c * up - s * (w * uq);
          u(r, q) = s * up + c * (w * uq);
        }
        for (std::size_t r = 0; r < n; ++r) {
          const cplx vp = v(r, p), vq = v(r, q);
          v(r, p) = c * vp - s * (w * vq);
          v(r, q) = s * vp + c * (w * vq);
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sig(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s2 = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s2 += std::norm(u(r, j));
    sig[j] = std::sqrt(s2);
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });
  SvdResult out;
  out.sigma.resize(n);
  out.u = CMatrix(rows, n);
  out.v = CMatrix(n, n);
  const double smax = sig.empty() ? 0.0 : sig[idx[0]];
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = idx[j];
    out.sigma[j] = sig[src];
    const bool live = sig[src] > smax * 1e-300 && sig[src] > 0.0;
    const double inv = live ? 1.0 / sig[src] : 0.0;
    for (std::size_t r = 0; r < rows; ++r) out.u(r, j) = u(r, src) * inv;
    for (std::size_t r = 0; r < n; ++r) out.v(r, j) = v(r, src);
  }
  return out;
}

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const SvdResult s = svd(m);
  return s.sigma.empty() ? 0.0 : s.sigma[0];
}

std::size_t rank(const CMatrix& m, double tol) {
  const SvdResult s = svd(m);
  if (s.sigma.empty() || s.sigma[0] <= 0.0) return 0;
  const double cut = tol * s.sigma[0];
  std::size_t r = 0;
  for (double x : s.sigma)
    if (x > cut) ++r;
  return r;
}

CMatrix pinv(const CMatrix& m, double tol) {
  const SvdResult s = svd(m);
  CMatrix out(m.cols(), m.rows());
  if (s.sigma.empty() || s.sigma[0] <= 0.0) return out;
  const double cut = tol * s.sigma[0];
  for (std::size_t j = 0; j < s.sigma.size(); ++j) {
    if (s.sigma[j] <= cut) break;
    const double inv = 1.0 / s.sigma[j];
    // out += inv * v_j u_j^*
    for (std::size_t r = 0; r < m.cols(); ++r) {
      const cplx vj = s.v(r, j) * inv;
      for (std::size_t c = 0; c < m.rows(); ++c)
        out(r, c) += vj * std::conj(s.u(c, j));
    }
  }
  return out;
}

std::vector<CMatrix> orthonormal_span(const std::vector<CMatrix>& vs,
                                      double tol) {
  if (vs.empty()) throw Error(ErrorKind::EmptySpan, "no spanning vectors");
  const std::size_t r = vs[0].rows(), c = vs[0].cols();
  CMatrix stacked(r * c, vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) {
    if (vs[j].rows() != r || vs[j].cols() != c)
      throw Error(ErrorKind::ShapeMismatch, "orthonormal_span shapes differ");
    for (std::size_t i = 0; i < r * c; ++i)
      stacked(i, j) = vs[j].data()[i];
  }
  const SvdResult s = svd(stacked);
  if (s.sigma.empty() || s.sigma[0] <= 0.0)
    throw Error(ErrorKind::EmptySpan, "span is the zero space");
  const double cut = tol * s.sigma[0];
  std::vector<CMatrix> basis;
  for (std::size_t j = 0; j < s.sigma.size(); ++j) {
    if (s.sigma[j] <= cut) break;
    CMatrix b(r, c);
    for (std::size_t i = 0; i < r * c; ++i) b.data()[i] = s.u(i, j);
    basis.push_back(std::move(b));
  }
  if (basis.empty()) throw Error(ErrorKind::EmptySpan, "span is the zero space");
  return basis;
}

Lu lu_factor(CMatrix a) {
  if (a.rows() != a.cols())
    throw Error(ErrorKind::ShapeMismatch, "lu_factor: not square");
  const std::size_t n = a.rows();
  Lu f;
  f.perm.resize(n);
  std::iota(f.perm.begin(), f.perm.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = std::abs(a(i, k));
      if (m > best) {
        best = m;
        piv = i;
      }
    }
    if (best == 0.0)
      throw Error(ErrorKind::InvalidConfig, "lu_factor: singular matrix");
    if (piv != k) {
      std::swap(f.perm[k], f.perm[piv]);
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
    }
    const cplx inv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx l = a(i, k) * inv;
      a(i, k) = l;
      if (l == cplx{0.0, 0.0}) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  f.lu = std::move(a);
  return f;
}

CMatrix lu_solve(const Lu& f, CMatrix b) {
  const std::size_t n = f.lu.rows();
  if (b.rows() != n) throw Error(ErrorKind::ShapeMismatch, "lu_solve rhs");
  CMatrix x(n, b.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) = b(f.perm[i], j);
  // forward substitution (unit lower)
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t k = 0; k < i; ++k) {
      const cplx l = f.lu(i, k);
      if (l == cplx{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) -= l * x(k, j);
    }
  // back substitution
  for (std::size_t ii = n; ii-- > 0;) {
    const cplx inv = 1.0 / f.lu(ii, ii);
    for (std::size_t j = 0; j < b.cols(); ++j) {
      cplx s = x(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k) s -= f.lu(ii, k) * x(k, j);
      x(ii, j) = s * inv;
    }
  }
  return x;
}

CMatrix psd_sqrt(const CMatrix& m, double tol) {
  EigResult eg = eig_hermitian(m, tol);
  const std::size_t n = m.rows();
  CMatrix scaled = eg.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::sqrt(std::max(eg.values[j], 0.0));
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= s;
  }
  return scaled * eg.vectors.adjoint();
}

CMatrix expm(const CMatrix& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::ShapeMismatch, "expm: not square");
  if (!m.all_finite())
    throw Error(ErrorKind::InvalidConfig, "expm: non-finite entries");
  const std::size_t n = m.rows();
  double norm1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double colsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) colsum += std::abs(m(i, j));
    norm1 = std::max(norm1, colsum);
  }
  constexpr double theta13 = 5.371920351148152;
  int s = 0;
  if (norm1 > theta13)
    s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  CMatrix a = (1.0 / std::ldexp(1.0, s)) * m;

  static const double b[14] = {64764752532480000.0,
                               32382376266240000.0,
                               7771770303897600.0,
                               1187353796428800.0,
                               129060195264000.0,
                               10559470521600.0,
                               670442572800.0,
                               33522128640.0,
                               1323241920.0,
                               40840800.0,
                               960960.0,
                               16380.0,
                               182.0,
                               1.0};
  const CMatrix eye = CMatrix::identity(n);
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a2 * a4;
  CMatrix u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
              b[5] * a4 + b[3] * a2 + b[1] * eye;
  u = a * u;
  CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
              b[4] * a4 + b[2] * a2 + b[0] * eye;
  const Lu f = lu_factor(v - u);
  CMatrix r = lu_solve(f, v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

}  // namespace bqds
