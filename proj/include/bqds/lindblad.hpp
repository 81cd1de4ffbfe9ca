#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bqds/blockcp.hpp"

namespace bqds {

// One block-diagonal coupling matrix Z = diag(z1, z2).
struct ZetaBlock {
  CMatrix z1;
  CMatrix z2;
};

// Bounded generator of a uniformly continuous block CP semigroup on
// M_2(M_d):
//
//   L(A) = A beta + beta^* A + sum_i Z_i^* A Z_i,
//
// with beta = diag(beta1, beta2) and every Z_i block diagonal, so L and
// e^{tL} respect the corner decomposition.
struct BlockGenerator {
  std::size_t d = 0;
  CMatrix beta1;
  CMatrix beta2;
  std::vector<ZetaBlock> zetas;
  CMatrix superop;  // (2d)^2 x (2d)^2, row-major vec convention
};

BlockGenerator build_generator(const CMatrix& beta1, const CMatrix& beta2,
                               const std::vector<ZetaBlock>& zetas);

// L(A) evaluated directly (not through the superoperator).
CMatrix generator_apply(const BlockGenerator& gen, const CMatrix& a);

// diag(beta1, beta2) and diag(z1_i, z2_i) in M_{2d}.
CMatrix beta_full(const BlockGenerator& gen);
CMatrix zeta_full(const BlockGenerator& gen, std::size_t i);

// beta blocks balancing the coupling so that L(1) = 0:
// beta_k = i h_k - (1/2) sum_i (z_k_i)^* z_k_i for Hermitian h_k.
std::pair<CMatrix, CMatrix> markov_betas(const CMatrix& h1,
                                         const CMatrix& h2,
                                         const std::vector<ZetaBlock>& zetas);

// Phi_t = exp(t L) as a CP map on M_{2d}.  Throws NotCP when the Choi
// matrix of the exponential fails positivity (the generator was not
// conditionally completely positive).
CpMap semigroup_at(const BlockGenerator& gen, double t, double tol = 1e-9);

// The four corners of L as maps on M_d, together with the contraction T
// extracted from the coupling map tau(A) = sum_i Z_i^* A Z_i (a block CP
// map in its own right), certifying the corner identity
//
//   L12(a) = a beta2 + beta1^* a + <[zeta1], T a [zeta2]>
//
// on matrix units and the adjoint relation L21(a) = L12(a^*)^*.
// `t` is empty when there is no coupling.
struct GeneratorCorners {
  MatrixUnitMap l11;
  MatrixUnitMap l12;
  MatrixUnitMap l21;
  MatrixUnitMap l22;
  std::optional<ContractionReport> t;
  double identity_residual = 0.0;
  double adjoint_residual = 0.0;
};

GeneratorCorners generator_corners(const BlockGenerator& gen,
                                   const Tolerances& tol = {});

// Superoperator of the (1,2) corner L12 on M_d, row-major vec convention.
CMatrix corner_superop(const BlockGenerator& gen);

// Matches the derivative form of the corner against its unit-to-unit data:
// with gamma_w = beta2 and eta_w = T [zeta2], the corner must equal
//   L12(a) = <[zeta1], a eta_w> + a gamma_w + beta1^* a,
// and the finite difference (e^{t L12}(a) - a)/t must converge to L12(a)
// at first order.
struct UnitDerivativeReport {
  double identity_residual = 0.0;
  double finite_difference_error = 0.0;  // at t = 1e-4
};

UnitDerivativeReport unit_derivative_check(const BlockGenerator& gen,
                                           const Tolerances& tol = {});

// Superoperator with the off-diagonal coupling scaled by c (c = 1 gives
// the generator's own superoperator).  For c beyond the contraction bound
// the exponential fails complete positivity at small times.
CMatrix perturbed_superop(const BlockGenerator& gen, double c);

// Images of the matrix units under exp(t m) for a superoperator m on
// M_n, row-major vec convention.
MatrixUnitMap exp_superop(const CMatrix& m, std::size_t n, double t);

}  // namespace bqds
