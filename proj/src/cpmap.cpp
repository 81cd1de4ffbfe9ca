#include "bqds/cpmap.hpp"

#include <cmath>

namespace bqds {

namespace {
// Relative eigenvalue cut for Choi rank decisions.
constexpr double kChoiCut = 1e-10;
}  // namespace

CMatrix MatrixUnitMap::apply(const CMatrix& a) const {
  if (a.rows() != n || a.cols() != n)
    throw Error(ErrorKind::ShapeMismatch, "MatrixUnitMap::apply");
  CMatrix out(d, d);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const cplx s = a(p, q);
      if (s == cplx{0.0, 0.0}) continue;
      out += s * images[p * n + q];
    }
  return out;
}

CMatrix MatrixUnitMap::choi() const {
  CMatrix c(n * d, n * d);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const CMatrix& img = images[p * n + q];
      for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y)
          c(p * d + x, q * d + y) = img(x, y);
    }
  return c;
}

MatrixUnitMap MatrixUnitMap::from_function(
    std::size_t n, std::size_t d,
    const std::function<CMatrix(const CMatrix&)>& f) {
  MatrixUnitMap m;
  m.n = n;
  m.d = d;
  m.images.reserve(n * n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) m.images.push_back(f(matrix_unit(n, p, q)));
  return m;
}

MatrixUnitMap operator+(const MatrixUnitMap& a, const MatrixUnitMap& b) {
  if (a.n != b.n || a.d != b.d)
    throw Error(ErrorKind::ShapeMismatch, "MatrixUnitMap sum");
  MatrixUnitMap out = a;
  for (std::size_t i = 0; i < out.images.size(); ++i)
    out.images[i] += b.images[i];
  return out;
}

MatrixUnitMap operator*(cplx s, const MatrixUnitMap& m) {
  MatrixUnitMap out = m;
  for (auto& img : out.images) img *= s;
  return out;
}

double map_distance(const MatrixUnitMap& a, const MatrixUnitMap& b) {
  if (a.n != b.n || a.d != b.d)
    throw Error(ErrorKind::ShapeMismatch, "map_distance");
  double m = 0.0;
  for (std::size_t i = 0; i < a.images.size(); ++i)
    m = std::max(m, max_abs_diff(a.images[i], b.images[i]));
  return m;
}

MatrixUnitMap adjoint_map(const MatrixUnitMap& f) {
  MatrixUnitMap out;
  out.n = f.n;
  out.d = f.d;
  out.images.resize(f.images.size());
  // (f^*)(E_pq) = f(E_qp)^*
  for (std::size_t p = 0; p < f.n; ++p)
    for (std::size_t q = 0; q < f.n; ++q)
      out.images[p * f.n + q] = f.images[q * f.n + p].adjoint();
  return out;
}

PsdReport is_cp(const MatrixUnitMap& f, double tol) {
  const CMatrix c = f.choi();
  const double scale = std::max(1.0, c.frobenius_norm());
  if (distance(c, c.adjoint()) > tol * scale) {
    // Not even *-preserving; report the Hermitian part's bottom eigenvalue.
    const EigResult eg = eig_hermitian(0.5 * (c + c.adjoint()), 1.0);
    return {false, eg.values.empty() ? 0.0 : eg.values.back()};
  }
  return psd_check(c, tol);
}

CpMap CpMap::from_kraus(std::size_t n, std::size_t d,
                        const std::vector<CMatrix>& kraus, double tol) {
  if (n == 0 || d == 0)
    throw Error(ErrorKind::InvalidConfig, "CpMap: zero dimension");
  if (kraus.empty())
    throw Error(ErrorKind::InvalidConfig, "CpMap: empty Kraus family");
  for (const auto& k : kraus) {
    if (k.rows() != n || k.cols() != d)
      throw Error(ErrorKind::ShapeMismatch, "CpMap: Kraus operator shape");
    if (!k.all_finite())
      throw Error(ErrorKind::InvalidConfig, "CpMap: non-finite Kraus entries");
  }
  CpMap m;
  m.n_ = n;
  m.d_ = d;
  // choi = sum_k conj(vec K_k) vec(K_k)^T
  m.choi_ = CMatrix(n * d, n * d);
  for (const auto& k : kraus) {
    const CMatrix w = vec(k).conj();
    for (std::size_t i = 0; i < n * d; ++i) {
      const cplx wi = w(i, 0);
      if (wi == cplx{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < n * d; ++j)
        m.choi_(i, j) += wi * std::conj(w(j, 0));
    }
  }
  // Keep the family as given when it is linearly independent; otherwise
  // rebuild an independent family from the Choi eigenvectors.
  CMatrix stacked(n * d, kraus.size());
  for (std::size_t j = 0; j < kraus.size(); ++j) {
    const CMatrix w = vec(kraus[j]);
    for (std::size_t i = 0; i < n * d; ++i) stacked(i, j) = w(i, 0);
  }
  if (rank(stacked, tol) == kraus.size()) {
    m.kraus_ = kraus;
    return m;
  }
  const EigResult eg = eig_hermitian(m.choi_, std::max(tol, 1e-9));
  const double lmax = eg.values.empty() ? 0.0 : eg.values.front();
  for (std::size_t j = 0; j < eg.values.size(); ++j) {
    if (eg.values[j] <= kChoiCut * lmax || eg.values[j] <= 0.0) break;
    const double w = std::sqrt(eg.values[j]);
    CMatrix k(n, d);
    for (std::size_t i = 0; i < n * d; ++i)
      k.data()[i] = w * std::conj(eg.vectors(i, j));
    m.kraus_.push_back(std::move(k));
  }
  return m;
}

CpMap CpMap::from_choi(std::size_t n, std::size_t d, const CMatrix& choi,
                       double tol) {
  if (choi.rows() != n * d || choi.cols() != n * d)
    throw Error(ErrorKind::ShapeMismatch, "CpMap: Choi shape");
  const PsdReport rep = psd_check(choi, tol);
  if (!rep.psd)
    throw Error(ErrorKind::NotCP, "Choi matrix has a negative eigenvalue",
                rep.min_eigenvalue);
  const EigResult eg = eig_hermitian(choi, tol);
  CpMap m;
  m.n_ = n;
  m.d_ = d;
  const double lmax = eg.values.empty() ? 0.0 : std::max(eg.values.front(), 0.0);
  for (std::size_t j = 0; j < eg.values.size(); ++j) {
    if (eg.values[j] <= kChoiCut * lmax || eg.values[j] <= 0.0) break;
    const double w = std::sqrt(eg.values[j]);
    CMatrix k(n, d);
    for (std::size_t i = 0; i < n * d; ++i)
      k.data()[i] = w * std::conj(eg.vectors(i, j));
    m.kraus_.push_back(std::move(k));
  }
  if (m.kraus_.empty())
    throw Error(ErrorKind::InvalidConfig, "CpMap: zero map has no Kraus form");
  // Rebuild the Choi from the retained family so both views agree exactly.
  CpMap rebuilt = from_kraus(n, d, m.kraus_, tol);
  return rebuilt;
}

CMatrix CpMap::apply(const CMatrix& a) const {
  if (a.rows() != n_ || a.cols() != n_)
    throw Error(ErrorKind::ShapeMismatch, "CpMap::apply");
  CMatrix out(d_, d_);
  for (const auto& k : kraus_) out += k.adjoint() * a * k;
  return out;
}

MatrixUnitMap CpMap::as_unit_map() const {
  MatrixUnitMap m;
  m.n = n_;
  m.d = d_;
  m.images.reserve(n_ * n_);
  for (std::size_t p = 0; p < n_; ++p)
    for (std::size_t q = 0; q < n_; ++q) {
      // phi(E_pq) = sum_k K_k^* E_pq K_k is row_p(K)^* row_q(K) summed.
      CMatrix img(d_, d_);
      for (const auto& k : kraus_) {
        for (std::size_t x = 0; x < d_; ++x)
          for (std::size_t y = 0; y < d_; ++y)
            img(x, y) += std::conj(k(p, x)) * k(q, y);
      }
      m.images.push_back(std::move(img));
    }
  return m;
}

bool CpMap::is_unital(double tol) const {
  return approx_equal(apply(CMatrix::identity(n_)), CMatrix::identity(d_), tol);
}

bool CpMap::is_contractive(double tol) const {
  const CMatrix one = apply(CMatrix::identity(n_));
  const EigResult eg = eig_hermitian(one, 1e-7);
  return eg.values.empty() || eg.values.front() <= 1.0 + tol;
}

CpMap compose(const CpMap& phi, const CpMap& psi) {
  if (phi.out_dim() != psi.in_dim())
    throw Error(ErrorKind::ShapeMismatch, "compose: inner dimensions");
  std::vector<CMatrix> prods;
  prods.reserve(phi.kraus().size() * psi.kraus().size());
  for (const auto& k : phi.kraus())
    for (const auto& l : psi.kraus()) prods.push_back(k * l);
  return CpMap::from_kraus(phi.in_dim(), psi.out_dim(), prods);
}

CpMap identity_cpmap(std::size_t n) {
  return CpMap::from_kraus(n, n, {CMatrix::identity(n)});
}

CpMap power(const CpMap& phi, std::size_t t) {
  if (phi.in_dim() != phi.out_dim())
    throw Error(ErrorKind::ShapeMismatch, "power: map not an endomap");
  CpMap acc = identity_cpmap(phi.in_dim());
  for (std::size_t i = 0; i < t; ++i) acc = compose(acc, phi);
  return acc;
}

CMatrix StinespringRep::pi(const CMatrix& a) const {
  if (a.rows() != n || a.cols() != n)
    throw Error(ErrorKind::ShapeMismatch, "StinespringRep::pi");
  return kron(a, CMatrix::identity(r));
}

bool StinespringRep::is_unital(double tol) const {
  return approx_equal(v.adjoint() * v, CMatrix::identity(d), tol);
}

StinespringRep minimal_stinespring(const CpMap& phi) {
  StinespringRep rep;
  rep.n = phi.in_dim();
  rep.d = phi.out_dim();
  rep.r = phi.kraus().size();
  rep.v = CMatrix(rep.n * rep.r, rep.d);
  // v (x) basis: row (i, k) = i*r + k carries K_k[i, :].
  for (std::size_t k = 0; k < rep.r; ++k)
    for (std::size_t i = 0; i < rep.n; ++i)
      for (std::size_t q = 0; q < rep.d; ++q)
        rep.v(i * rep.r + k, q) = phi.kraus()[k](i, q);
  return rep;
}

}  // namespace bqds
