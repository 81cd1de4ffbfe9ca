#pragma once

#include <cstdint>
#include <vector>

#include "bqds/prodsys.hpp"

namespace bqds {

// Finite-horizon realization of the E_0-dilation of a unital block step.
// The genuine inductive-limit space is infinite dimensional even in
// discrete time, so everything is stated at staggered horizons: operators
// on cal E_s are amplified to cal E_{s+t}, vectors embed through
// k_{s -> t}(x) = xi-hat_{t-s} (.) x, and every identity is checked at a
// matched horizon pair.
struct DilationHorizon {
  std::size_t horizon = 0;
  DiscreteQds qds;       // unital step, block w.r.t. p
  InclusionSystem sys;
  ProductSystem ps;
  CMatrix p;             // diagonal projection in the base algebra
  CMatrix p_perp;        // 1 - p
};

// Validates that the step is a unital endomorphism (NotUnital otherwise),
// that p is a 0/1 diagonal projection (InvalidConfig), that the step is
// block with respect to p (NotBlock) and consequently fixes p and 1 - p,
// then builds the inclusion and product systems up to the horizon.
DilationHorizon make_dilation(const CpMap& step, std::size_t horizon,
                              const CMatrix& p, const Tolerances& tol = {});

// k_{s -> t} : cal E_s -> cal E_t, x -> xi-hat_{t-s} (.) x.  Isometric
// (the step is unital) and compatible: k_{t->u} k_{s->t} = k_{s->u}.
BilinearMap embedding(const DilationHorizon& dil, std::size_t s,
                      std::size_t t);

// theta_t(a) = B_{s,t} (a (.) id) B_{s,t}^*: the amplification
// kron(a, 1_mu) of an operator on cal E_s to an operator on cal E_{s+t}.
// Unital *-endomorphism in each t and a semigroup over t.
CMatrix theta(const DilationHorizon& dil, const CMatrix& a, std::size_t s,
              std::size_t t);

// j0(b, s) = |xi-hat_s> b <xi-hat_s|; j0(1, s) is a projection.
CMatrix j0(const DilationHorizon& dil, const CMatrix& b, std::size_t s);

// Relative residual of the Markov property at horizon s + t:
//   j0(1) theta_t(j0(x, s)) j0(1) = j0(step^t(x), s + t).
double markov_check(const DilationHorizon& dil, const CMatrix& x,
                    std::size_t s, std::size_t t);

// The family Q_s(q) = theta_{N-s}(j0(q, s)) on cal E_N, s = 0..N, stored
// at index s.  Projections, increasing as s decreases, terminating at the
// left action of q.
struct ProjectionChain {
  std::vector<CMatrix> ops;
  double projection_residual = 0.0;  // max |Q^2 - Q|
  double ordering_margin = 0.0;      // min eigenvalue of Q_{s-1} - Q_s
  double terminal_gap = 0.0;         // Q_0 vs kron(q, 1)
};

ProjectionChain increasing_projections(const DilationHorizon& dil,
                                       const CMatrix& q);

// Stabilization of the projection family on an embedded vector: for
// x in cal E_t and every s <= N - t,
//   Q_s(q) k_{t->N}(x) = k_{t->N}(pi(q) x),
// independent of s.  Also verifies the unit identities
// q xi-hat_u = xi-hat_u q = q xi-hat_u q at every level.
struct StabilizationReport {
  double stabilization_residual = 0.0;
  double unit_commutation = 0.0;
  bool stable = false;
};

StabilizationReport stabilization_check(const DilationHorizon& dil,
                                        const CMatrix& q, std::size_t t,
                                        const CMatrix& x);

// Corner preservation of the dilation endomorphisms with respect to the
// left action of p at every level, plus the concatenation identity
//   u_t(theta_s(j0(q)) k_s(x) (.) y) = theta_{s+t}(j0(q)) k_{s+t}(x (.) y)
// realized at matched horizons on random vectors.
struct BlockEndoReport {
  double corner_leakage = 0.0;
  double u_residual = 0.0;
};

BlockEndoReport block_endomorphism_check(const DilationHorizon& dil,
                                         std::size_t samples,
                                         std::uint64_t seed);

}  // namespace bqds
