#pragma once

#include <functional>
#include <vector>

#include "bqds/numerics.hpp"

namespace bqds {

// Linear map M_n -> M_d given by its values on the matrix units E_pq,
// stored at index p*n+q.  Used for maps that need not be completely
// positive (off-diagonal corners, adjoints, generators).
struct MatrixUnitMap {
  std::size_t n = 0;  // domain M_n
  std::size_t d = 0;  // codomain M_d
  std::vector<CMatrix> images;

  CMatrix apply(const CMatrix& a) const;
  // Choi matrix sum_pq E_pq (x) images[pq], size (n*d) x (n*d).
  CMatrix choi() const;
  static MatrixUnitMap from_function(
      std::size_t n, std::size_t d,
      const std::function<CMatrix(const CMatrix&)>& f);
};

MatrixUnitMap operator+(const MatrixUnitMap& a, const MatrixUnitMap& b);
MatrixUnitMap operator*(cplx s, const MatrixUnitMap& m);
double map_distance(const MatrixUnitMap& a, const MatrixUnitMap& b);
// a -> f(a^*)^*
MatrixUnitMap adjoint_map(const MatrixUnitMap& f);
// Complete positivity test: Choi positive semidefiniteness with witness.
PsdReport is_cp(const MatrixUnitMap& f, double tol = 1e-9);

// Completely positive map M_n -> M_d in operator (Heisenberg) form
//   phi(a) = sum_i K_i^* a K_i,     K_i in Hom(C^d, C^n)  (n-by-d matrices).
// The Kraus family is kept linearly independent; the Choi matrix is cached.
class CpMap {
 public:
  // Builds from a Kraus family, collapsing linear dependencies through the
  // Choi eigendecomposition (the action is preserved, the family is not).
  static CpMap from_kraus(std::size_t n, std::size_t d,
                          const std::vector<CMatrix>& kraus,
                          double tol = 1e-9);
  // Builds from a Choi matrix; throws NotCP when it is not PSD within tol.
  static CpMap from_choi(std::size_t n, std::size_t d, const CMatrix& choi,
                         double tol = 1e-9);

  std::size_t in_dim() const { return n_; }    // domain M_n
  std::size_t out_dim() const { return d_; }   // codomain M_d
  const std::vector<CMatrix>& kraus() const { return kraus_; }
  const CMatrix& choi() const { return choi_; }
  std::size_t choi_rank() const { return kraus_.size(); }

  CMatrix apply(const CMatrix& a) const;
  MatrixUnitMap as_unit_map() const;
  bool is_unital(double tol = 1e-9) const;       // phi(1) = 1
  bool is_contractive(double tol = 1e-9) const;  // phi(1) <= 1

 private:
  CpMap() = default;
  std::size_t n_ = 0, d_ = 0;
  std::vector<CMatrix> kraus_;
  CMatrix choi_;
};

// psi o phi (apply phi first); Kraus family {K_i L_j} reduced.
CpMap compose(const CpMap& phi, const CpMap& psi);
// t-fold composition power; t = 0 gives the identity map on M_n.
CpMap power(const CpMap& phi, std::size_t t);
CpMap identity_cpmap(std::size_t n);

// Minimal Stinespring dilation: phi(a) = v^* (a (x) I_r) v with
// v : C^d -> C^n (x) C^r and r the Choi rank.
struct StinespringRep {
  std::size_t n = 0, d = 0, r = 0;
  CMatrix v;  // (n*r) x d
  CMatrix pi(const CMatrix& a) const;  // a (x) I_r
  bool is_unital(double tol = 1e-9) const;  // v^* v = 1
};

StinespringRep minimal_stinespring(const CpMap& phi);

}  // namespace bqds
