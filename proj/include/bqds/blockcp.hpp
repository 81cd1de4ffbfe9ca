#pragma once

#include <cstdint>

#include "bqds/vnmodule.hpp"

namespace bqds {

// Slack accepted on the contraction bound ||T|| <= 1; pseudo-inverse noise
// on rank-deficient Gram matrices lands well below this.
inline constexpr double kContractionSlack = 1e-7;

// Completely positive map on M_2(M_n) that respects the 2x2 corner
// decomposition: full(E_ii X E_jj) lies in the (i, j) corner.  Indexing is
// block-major throughout: row i*n + p of M_{2n} is block i, inner index p.
//
//   full = ( phi1  psi  )
//          ( psi*  phi2 )
//
// phi1, phi2 are CP in their own right; psi is merely linear and is stored
// by its values on matrix units.
struct BlockCpMap {
  std::size_t n = 0;  // inner domain dimension (full acts on M_{2n})
  std::size_t d = 0;  // inner codomain dimension
  CpMap full;
  CpMap phi1;
  CpMap phi2;
  MatrixUnitMap psi;
};

// Splits a CP map on M_{2n} into corners and certifies the block property
// (off-corner leakage <= tol relative to the component scale) plus the
// adjoint symmetry of the two off-diagonal corners.
// Throws GradingMismatch (odd dimensions), NotBlock (leakage witness),
// NotCP (a diagonal compression fails positivity).
BlockCpMap verify_block(const CpMap& full, double tol = 1e-9);

// The two CP summands whose sum realizes a block map built from a
// contraction T between GNS modules of the diagonal components:
//   pair_part(A)   = W^* M_2(pi_1)(A) W,  W = diag(x_1, T x_2)
//   defect_part(A) = compression by (0, sqrt(1 - T^* T) x_2) in module 2.
// Each is CP by construction (explicit Kraus families; the defect family
// is empty of mass when T is isometric); their sum has corners
// (phi1, psi; psi*, phi2) with psi(a) = <x_1, T a x_2>.
struct ContractionSummands {
  std::vector<CMatrix> pair_kraus;
  std::vector<CMatrix> defect_kraus;
  MatrixUnitMap pair_part;
  MatrixUnitMap defect_part;
};

ContractionSummands build_summands(const GnsModule& gns1,
                                   const GnsModule& gns2,
                                   const CMatrix& t_mat, double tol = 1e-9);

// Corner assembly without any validation: the images on matrix units of
// the map (phi1, psi; psi*, phi2) with psi(a) = <x_1, T a x_2>.  Useful for
// probing norm-violating T where the result is not CP.
MatrixUnitMap block_images_from_contraction(const CpMap& phi1,
                                            const CpMap& phi2,
                                            const GnsModule& gns1,
                                            const GnsModule& gns2,
                                            const CMatrix& t_mat);

// Assembles the block CP map determined by phi1, phi2 and a bilinear
// contraction T : E_2 -> E_1 between GNS modules (E_i, x_i) of the phi_i.
// The result is CP by construction (Kraus union of the two summands) and
// is certified to match the corner assembly before returning.
// Throws DimMismatch (T's frames are not the supplied modules),
// InvalidConfig (a gns_i does not reproduce phi_i), NotBilinear,
// NotContraction (norm witness), Inconsistent (assembly mismatch).
BlockCpMap build_from_contraction(const CpMap& phi1, const CpMap& phi2,
                                  const GnsModule& gns1,
                                  const GnsModule& gns2, const BilinearMap& t,
                                  const Tolerances& tol = {});

// Result of recovering the contraction from a block CP map.  Both
// extraction routes return T in the same frame: a bilinear map from the
// supplied (by default the canonical minimal) GNS module of phi2 to that of
// phi1, together with its multiplicity factor s (t.mat = 1_n (x) s when the
// frames are canonical).
struct ContractionReport {
  BilinearMap t;
  CMatrix s;
  double operator_norm = 0.0;
  double intertwining_residual = 0.0;
  double reconstruction_residual = 0.0;
};

// Module route: follows the two-sided GNS construction of the full map.
// The diagonal corner pieces of the full GNS module are trimmed to exact
// amplification form, the off-diagonal unit transports one onto the other,
// and the composition is compressed to the cyclic parts and identified with
// the canonical modules.
ContractionReport extract_contraction_module(const BlockCpMap& b,
                                             const Tolerances& tol = {});

// Same route, but identifies against caller-supplied GNS modules of the
// diagonal components (which may be non-minimal; the result is then the
// compression of the contraction to the cyclic parts).
ContractionReport extract_contraction_module_given(const BlockCpMap& b,
                                                   const GnsModule& gns1,
                                                   const GnsModule& gns2,
                                                   const Tolerances& tol = {});

// Intertwiner route: in minimal Stinespring frames the left actions are
// exact amplifications, so T = 1_n (x) s with s an r1 x r2 unknown solved
// from psi's values on matrix units by least squares.
// Throws Inconsistent when the linear system has no solution within
// tol.verify (the input was not genuinely block CP) and NormExceeded when
// the solved s violates ||s|| <= 1 + slack.
ContractionReport extract_contraction_stinespring(const BlockCpMap& b,
                                                  const Tolerances& tol = {});

// Largest entrywise deviation between the two reports' contractions (both
// live in the canonical frame).
double cross_validate(const ContractionReport& a, const ContractionReport& b);

// Re-extracts the contraction `trials` times under random unitary changes
// of the GNS multiplicity bases, maps each result back to the canonical
// frame, and returns the maximum pairwise deviation.  Small values witness
// that the extracted contraction is basis-independent.
double uniqueness_probe(const BlockCpMap& b, std::size_t trials,
                        std::uint64_t seed);

}  // namespace bqds
