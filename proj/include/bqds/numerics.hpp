#pragma once

#include <vector>

#include "bqds/cmatrix.hpp"

namespace bqds {

// Eigenvalues in descending order; column j of `vectors` is the eigenvector
// of values[j], so m = V diag(values) V^*.
struct EigResult {
  std::vector<double> values;
  CMatrix vectors;
};

// Hermitian eigendecomposition by Householder tridiagonalization followed by
// implicit-shift QL.  Throws NotHermitian when the symmetry residual exceeds
// tol relative to the matrix scale.
EigResult eig_hermitian(const CMatrix& m, double tol = 1e-9);

struct PsdReport {
  bool psd = false;
  double min_eigenvalue = 0.0;  // witness either way
};

// True iff every eigenvalue is >= -tol.
PsdReport psd_check(const CMatrix& m, double tol = 1e-9);

// Thin SVD m = U diag(sigma) V^* with sigma descending.  Columns of U and V
// beyond the numerical rank may be zero; consumers cut at a relative
// threshold.  Computed by one-sided Jacobi rotations.
struct SvdResult {
  CMatrix u;
  std::vector<double> sigma;
  CMatrix v;
};

SvdResult svd(const CMatrix& m);

double operator_norm(const CMatrix& m);
// Number of singular values above tol * sigma_max (relative cut).
std::size_t rank(const CMatrix& m, double tol = 1e-9);

// Moore-Penrose pseudoinverse with relative singular value cut.
CMatrix pinv(const CMatrix& m, double tol = 1e-9);

// Orthonormal basis (entrywise inner product) of the span of `vs`, all of a
// common shape.  Directions with singular value below tol * sigma_max are
// discarded.  Throws EmptySpan when nothing survives.
std::vector<CMatrix> orthonormal_span(const std::vector<CMatrix>& vs,
                                      double tol = 1e-9);

// Square root of a positive semidefinite Hermitian matrix through its
// eigendecomposition.  Eigenvalues below zero (noise on a PSD input) are
// clamped; the caller is responsible for rejecting genuinely indefinite
// input beforehand.
CMatrix psd_sqrt(const CMatrix& m, double tol = 1e-9);

// Matrix exponential by scaling-and-squaring with a degree-13 Pade
// approximant.
CMatrix expm(const CMatrix& m);

// LU factorization with partial pivoting, used by expm and exposed for
// linear solves.
struct Lu {
  CMatrix lu;
  std::vector<std::size_t> perm;
};

Lu lu_factor(CMatrix a);
CMatrix lu_solve(const Lu& f, CMatrix b);

}  // namespace bqds
