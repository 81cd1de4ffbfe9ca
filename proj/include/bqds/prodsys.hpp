#pragma once

#include <vector>

#include "bqds/semigroup.hpp"

namespace bqds {

// Ordered composition of a time span: parts (t_n, ..., t_1) left to right,
// all >= 1.  E_par is the tensor product of the fibers over the parts in
// this order.
struct Partition {
  std::vector<std::size_t> parts;

  std::size_t total() const;
};

bool operator==(const Partition& a, const Partition& b);

// All 2^{t-1} compositions of t, finest (1,...,1) first.
std::vector<Partition> partitions(std::size_t t);

// Whether every part of `coarse` is the sum of a consecutive group of
// parts of `fine` (order preserving).
bool refines(const Partition& fine, const Partition& coarse);

// Concatenation s ~ t, the composition whose module is E_s (.) E_t.
Partition joint(const Partition& s, const Partition& t);

// The finest composition (1, ..., 1) of t.
Partition finest(std::size_t t);

// Tensor product of the system's fibers over the parts.
VnBimodule partition_module(const InclusionSystem& sys, const Partition& p);
// xi_{t_n} (.) ... (.) xi_{t_1}.
CMatrix partition_unit(const InclusionSystem& sys, const Partition& p);

// The splitting E_coarse -> E_fine assembled from the binary splittings:
// each part of `coarse` is split into its refining group, and the factor
// maps are tensored in order.  Isometric and bilinear; satisfies the
// composition law along refinement chains.  Throws NotRefinement.
BilinearMap refinement_map(const InclusionSystem& sys, const Partition& fine,
                           const Partition& coarse);

// Tensor of the morphism's fibers over the parts: T_par : E_par^2 -> E_par^1.
BilinearMap morphism_on_partition(const Morphism& t, const Partition& p);

// Product system generated by an inclusion system: fibers are the maximal
// (finest-composition) tensor powers cal E_t = E_1^{(.) t}, every composition
// includes isometrically through its refinement to (1,...,1), and the
// product B_{s,t} : cal E_s (.) cal E_t -> cal E_{s+t} is the concatenation
// identification (the two modules coincide on the nose here, so B is the
// identity matrix).
struct ProductSystem {
  std::size_t horizon = 0;
  std::vector<GnsModule> fibers;  // cal E_t with unit image, t = 0..N
  std::vector<std::vector<Partition>> index;      // compositions of t
  std::vector<std::vector<BilinearMap>> incl;     // i_par, aligned with index

  const GnsModule& fiber(std::size_t t) const;
  const BilinearMap& inclusion(const Partition& p) const;
  // B_{s,t}; identity matrix between literally equal modules.
  BilinearMap product(std::size_t s, std::size_t t) const;
};

ProductSystem generate(const InclusionSystem& sys);

// Residuals of the defining properties of the generated system.
struct ProductChecks {
  double inclusion_isometry = 0.0;
  double inclusion_bilinearity = 0.0;
  double compatibility = 0.0;   // i_coarse = i_fine . refinement
  double product_compat = 0.0;  // B(i_s (.) i_t) = i_{s ~ t}
  double associativity = 0.0;   // B triple products
  double unit_coherence = 0.0;  // i_{(t)}(xi_t) = xi-hat_t
};

ProductChecks verify_product_system(const ProductSystem& ps,
                                    const InclusionSystem& sys);

// Q_par = i_par i_par^*, the range projection of the embedded copy of
// E_par inside the fiber.
CMatrix partition_projection(const ProductSystem& ps, const Partition& p);

// Phi_par = j_par T_par i_par^*, the net map below the lift.
BilinearMap net_map(const ProductSystem& ps1, const ProductSystem& ps2,
                    const Morphism& t, const Partition& p);

struct LiftedMorphism {
  std::size_t horizon = 0;
  std::vector<BilinearMap> maps;  // That_t, t = 0..N
  double growth = 0.0;
};

struct LiftReport {
  LiftedMorphism lift;
  // max over all compositions par of |T_par - j_par^* That i_par|.
  double compression_residual = 0.0;
  // That_{s+t} vs B^1 (That_s (.) That_t) (B^2)^{-1}.
  double multiplicativity_residual = 0.0;
  // max over t of ||That_t|| - ||T_1||^t (tensor-power norm law margin).
  double norm_excess = 0.0;
};

// Lifts a weak morphism to the product systems: That_t = T_1^{(.) t} on the
// maximal fibers.  Every net map compresses back to the morphism and the
// lift is multiplicative across the products.  Throws NotMorphism when a
// verified residual exceeds tol.verify.
LiftReport lift_morphism(const Morphism& t, const ProductSystem& ps1,
                         const ProductSystem& ps2, const Tolerances& tol = {});

struct NetCheck {
  std::vector<double> norms;          // ||Phi_{r_j}(x') g|| along the chain
  double terminal_gap = 0.0;          // |last - ||That(x') g|||
  double monotonicity_margin = 0.0;   // min of consecutive differences
};

// Evaluates ||Phi_r (x') g|| along the refinement chain
// (s) <= (1, s-1) <= (1, 1, s-2) <= ... <= (1, ..., 1), with x' the
// compression Q_{(s)} x of x in cal E_s^2.  The sequence is monotone
// nondecreasing and ends at ||That_s(x') g||.
NetCheck monotone_net_check(const ProductSystem& ps1,
                            const ProductSystem& ps2, const Morphism& t,
                            std::size_t s, const CMatrix& x, const CMatrix& g);

}  // namespace bqds
