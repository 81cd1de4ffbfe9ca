#include "bqds/cmatrix.hpp"

#include <algorithm>
#include <cmath>

#include "bqds/kernels.hpp"

namespace bqds {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw Error(ErrorKind::ShapeMismatch, "matrix buffer size mismatch");
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols,
                 std::initializer_list<cplx> v)
    : CMatrix(rows, cols, std::vector<cplx>(v)) {}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  if (!same_shape(o)) throw Error(ErrorKind::ShapeMismatch, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  if (!same_shape(o)) throw Error(ErrorKind::ShapeMismatch, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      r(j, i) = std::conj((*this)(i, j));
  return r;
}

CMatrix CMatrix::transpose() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

CMatrix CMatrix::conj() const {
  CMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i)
    r.data_[i] = std::conj(data_[i]);
  return r;
}

CMatrix CMatrix::reshaped(std::size_t rows, std::size_t cols) const {
  if (rows * cols != rows_ * cols_)
    throw Error(ErrorKind::ShapeMismatch, "reshape changes element count");
  CMatrix r = *this;
  r.rows_ = rows;
  r.cols_ = cols;
  return r;
}

CMatrix CMatrix::block(std::size_t i0, std::size_t j0, std::size_t r,
                       std::size_t c) const {
  if (i0 + r > rows_ || j0 + c > cols_)
    throw Error(ErrorKind::ShapeMismatch, "block out of range");
  CMatrix out(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(i, j) = (*this)(i0 + i, j0 + j);
  return out;
}

void CMatrix::set_block(std::size_t i0, std::size_t j0, const CMatrix& m) {
  if (i0 + m.rows() > rows_ || j0 + m.cols() > cols_)
    throw Error(ErrorKind::ShapeMismatch, "set_block out of range");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) (*this)(i0 + i, j0 + j) = m(i, j);
}

cplx CMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const {
  return std::sqrt(kernels::znrm2sq(raw(), data_.size()));
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

bool CMatrix::all_finite() const {
  for (const auto& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorKind::ShapeMismatch, "matrix product dims");
  CMatrix c(a.rows(), b.cols());
  kernels::zgemm_acc(a.raw(), b.raw(), c.raw(), a.rows(), a.cols(), b.cols());
  return c;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx s = a(i, j);
      if (s == cplx{0.0, 0.0}) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          r(i * b.rows() + p, j * b.cols() + q) = s * b(p, q);
    }
  return r;
}

cplx hs_inner(const CMatrix& a, const CMatrix& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::ShapeMismatch, "hs_inner");
  double out[2];
  kernels::zdotc(a.raw(), b.raw(), a.size(), out);
  return {out[0], out[1]};
}

double distance(const CMatrix& a, const CMatrix& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::ShapeMismatch, "distance");
  return (a - b).frobenius_norm();
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::ShapeMismatch, "max_abs_diff");
  return (a - b).max_abs();
}

bool approx_equal(const CMatrix& a, const CMatrix& b, double tol) {
  return a.same_shape(b) && max_abs_diff(a, b) <= tol;
}

CMatrix matrix_unit(std::size_t n, std::size_t p, std::size_t q) {
  CMatrix m(n, n);
  m(p, q) = 1.0;
  return m;
}

CMatrix matrix_unit_rect(std::size_t rows, std::size_t cols, std::size_t p,
                         std::size_t q) {
  CMatrix m(rows, cols);
  m(p, q) = 1.0;
  return m;
}

CMatrix vec(const CMatrix& m) { return m.reshaped(m.rows() * m.cols(), 1); }

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::ParentMismatch: return "ParentMismatch";
    case ErrorKind::GradingMismatch: return "GradingMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::EmptySpan: return "EmptySpan";
    case ErrorKind::NotCP: return "NotCP";
    case ErrorKind::NotBlock: return "NotBlock";
    case ErrorKind::NotContraction: return "NotContraction";
    case ErrorKind::NotBilinear: return "NotBilinear";
    case ErrorKind::NotSubmodule: return "NotSubmodule";
    case ErrorKind::NotMorphism: return "NotMorphism";
    case ErrorKind::NotRefinement: return "NotRefinement";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::NormExceeded: return "NormExceeded";
    case ErrorKind::HorizonExceeded: return "HorizonExceeded";
    case ErrorKind::NotUnital: return "NotUnital";
    case ErrorKind::SizeGuard: return "SizeGuard";
  }
  return "UnknownError";
}

}  // namespace bqds
