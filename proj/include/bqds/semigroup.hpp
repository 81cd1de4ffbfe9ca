#pragma once

#include <vector>

#include "bqds/blockcp.hpp"

namespace bqds {

// Discrete-time semigroup generated by one CP step on M_m: phi_t = step^t,
// phi_0 = id.  Flags record whether the step is unital / contractive.
struct DiscreteQds {
  CpMap step;
  std::size_t horizon = 1;
  bool unital = false;
  bool contractive = false;
};

// Validates shape (endomorphism, horizon >= 1) and computes the flags.
DiscreteQds make_qds(const CpMap& step, std::size_t horizon,
                     double tol = 1e-9);

// The semigroup's tower of GNS modules E_t = GNS(step^t) together with the
// solved splittings
//
//   beta_{s,t} : E_{s+t} -> E_s (.) E_t,   xi_{s+t} |-> xi_s (.) xi_t,
//
// extended two-sided-linearly over the cyclic spanning set and certified
// isometric.  E_0 is the algebra itself (GNS module of the identity map).
struct InclusionSystem {
  std::size_t horizon = 0;
  std::vector<GnsModule> modules;  // E_t at index t = 0..N
  std::vector<BilinearMap> betas;  // beta(s,t) at s*(N+1)+t for s+t <= N

  const GnsModule& at(std::size_t t) const;
  const BilinearMap& beta(std::size_t s, std::size_t t) const;
};

InclusionSystem inclusion_system(const DiscreteQds& qds,
                                 const Tolerances& tol = {});

// Residuals of the defining properties, maximized over all admissible
// index combinations.
struct SystemChecks {
  double isometry = 0.0;         // ||beta^* beta - 1||
  double bilinearity = 0.0;      // intertwining of the left actions
  double unit = 0.0;             // beta(xi_{s+t}) vs xi_s (.) xi_t
  double coassociativity = 0.0;  // (beta (.) id) beta vs (id (.) beta) beta
  std::size_t cyclic_defect = 0;  // sum over t of (ambient - cyclic span)
};

SystemChecks verify_inclusion_system(const InclusionSystem& sys);

// phi_t(b) = <xi_t, b xi_t> for t = 0..N; recovers the semigroup from the
// unit alone.
std::vector<MatrixUnitMap> semigroup_from_unit(const InclusionSystem& sys);

// Family T_t : E_t^2 -> E_t^1 of bilinear adjointable maps between two
// inclusion systems; maps[0] is the identity on the trivial fiber.
struct Morphism {
  std::size_t horizon = 0;
  std::vector<BilinearMap> maps;
  double growth = 0.0;  // k with ||T_t|| <= e^{t k}
};

// Max residual over s, t >= 1, s+t <= N of the morphism identity:
//   weak:    T_{s+t} = beta1_{s,t}^* (T_s (.) T_t) beta2_{s,t}
//   strong:  beta1_{s,t} T_{s+t} = (T_s (.) T_t) beta2_{s,t}
double verify_morphism(const Morphism& t, const InclusionSystem& sys1,
                       const InclusionSystem& sys2, bool strong);

// Extends a single contraction T_1 : E_1^2 -> E_1^1 to the whole morphism
// through the splittings: T_t = beta1^*(T_1 (.) T_{t-1}) beta2.
Morphism morphism_from_single(const InclusionSystem& sys1,
                              const InclusionSystem& sys2,
                              const BilinearMap& t1,
                              const Tolerances& tol = {});

// Assembles the block semigroup (phi^1_t, psi_t; psi_t^*, phi^2_t) with
// psi_t(a) = <xi^1_t, T_t a xi^2_t>, certifies the semigroup law for all
// s+t <= N and CP of every step, and returns the one-step generator qds.
// Throws NotMorphism when the law fails, NotContraction / NotBilinear on a
// bad T_t.
DiscreteQds block_semigroup_from_morphism(const InclusionSystem& sys1,
                                          const InclusionSystem& sys2,
                                          const Morphism& t,
                                          const Tolerances& tol = {});

struct MorphismExtraction {
  Morphism morphism;
  std::vector<ContractionReport> reports;  // per t = 1..N at index t-1
  double weak_residual = 0.0;
  // Splitting of the full system's units into their diagonal corners:
  // beta(E_ii xi_{s+t} E_ii) vs (E_ii xi_s E_ii) (.) (E_ii xi_t E_ii).
  double consistency_residual = 0.0;
};

// Recovers the unique contractive weak morphism of a block semigroup: for
// each t the contraction of step^t is extracted between the corner
// semigroups' GNS modules, then the weak identity and the unit-corner
// splitting are verified.
MorphismExtraction extract_morphism(const DiscreteQds& qds,
                                    const Tolerances& tol = {});

}  // namespace bqds
