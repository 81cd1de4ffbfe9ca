#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "bqds/errors.hpp"

namespace bqds {

using cplx = std::complex<double>;

// Dense row-major complex matrix.  The only matrix type in the library;
// vectors are K-by-1, scalars embed as 1-by-1 where convenient.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);
  // Row-major literal, e.g. CMatrix(2, 2, {1, 0, 0, 1}).
  CMatrix(std::size_t rows, std::size_t cols, std::initializer_list<cplx> v);

  static CMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  // Interleaved [re, im] view for the kernel layer.
  double* raw() { return reinterpret_cast<double*>(data_.data()); }
  const double* raw() const { return reinterpret_cast<const double*>(data_.data()); }

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cplx s);

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conj() const;

  // Reinterpret the buffer with a new shape (rows*cols must be preserved).
  CMatrix reshaped(std::size_t rows, std::size_t cols) const;
  CMatrix block(std::size_t i0, std::size_t j0, std::size_t r,
                std::size_t c) const;
  void set_block(std::size_t i0, std::size_t j0, const CMatrix& m);
  CMatrix row(std::size_t i) const { return block(i, 0, 1, cols_); }
  CMatrix col(std::size_t j) const { return block(0, j, rows_, 1); }

  cplx trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  bool same_shape(const CMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(CMatrix a, cplx s);
// Kernel-dispatched product.
CMatrix operator*(const CMatrix& a, const CMatrix& b);

CMatrix kron(const CMatrix& a, const CMatrix& b);
// Entrywise (Hilbert-Schmidt) inner product <a, b> = sum conj(a_ij) b_ij.
cplx hs_inner(const CMatrix& a, const CMatrix& b);
double distance(const CMatrix& a, const CMatrix& b);  // Frobenius
// max |a_ij - b_ij|
double max_abs_diff(const CMatrix& a, const CMatrix& b);
bool approx_equal(const CMatrix& a, const CMatrix& b, double tol);

// n-by-n matrix unit E_pq (1 at row p, column q).
CMatrix matrix_unit(std::size_t n, std::size_t p, std::size_t q);
// Rectangular matrix unit.
CMatrix matrix_unit_rect(std::size_t rows, std::size_t cols, std::size_t p,
                         std::size_t q);
// Row-major flattening into a (rows*cols)-by-1 column.
CMatrix vec(const CMatrix& m);

}  // namespace bqds
