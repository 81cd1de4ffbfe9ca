#pragma once

#include <memory>
#include <vector>

#include "bqds/cpmap.hpp"

namespace bqds {

// Ambient dimensions past this bound are refused (SizeGuard).
inline constexpr std::size_t kAmbientGuard = 100000;
// Bound for materializing dense K x K operators (representations, theta).
inline constexpr std::size_t kDenseGuard = 4096;

void guard_ambient(std::size_t dim, std::size_t bound = kAmbientGuard);

// Unitary identification of a normal unital representation of M_n on C^K
// with the amplification a (x) I_mu, mu = K/n:
//
//   pi(a) = theta^* (a (x) I_mu) theta.
//
// theta is stored factored as theta0 (x) I_mult so that tensor products can
// grow the multiplicity without ever materializing large matrices.
class Trivializer {
 public:
  Trivializer() = default;
  Trivializer(std::size_t n, CMatrix theta0, std::size_t mult);
  // theta = identity: the representation is a (x) I_mu on the nose.
  static Trivializer exact(std::size_t n, std::size_t mu);
  // Recover theta from explicit unit images pi(E_pq), certifying that they
  // form a normal unital *-representation.
  static Trivializer from_rep_units(std::size_t n,
                                    const std::vector<CMatrix>& units,
                                    double tol);

  std::size_t n() const { return n_; }
  std::size_t dim() const { return k0_ * mult_; }     // K
  std::size_t mu() const { return dim() / n_; }       // multiplicity
  std::size_t mult() const { return mult_; }
  const CMatrix& theta0() const { return *theta0_; }

  CMatrix apply(const CMatrix& x) const;          // theta x
  CMatrix apply_adjoint(const CMatrix& y) const;  // theta^* y
  CMatrix left_act(const CMatrix& a, const CMatrix& x) const;  // pi(a) x
  CMatrix pi(const CMatrix& a) const;             // dense pi(a); guarded
  CMatrix pi_unit(std::size_t p, std::size_t q) const;
  CMatrix materialize() const;                    // dense theta; guarded
  // theta0 (x) I_{mult * extra}: trivializer of pi (x) id on C^{K * extra}.
  Trivializer tensor_extend(std::size_t extra) const;

 private:
  std::size_t n_ = 1;
  std::size_t k0_ = 1;
  std::size_t mult_ = 1;
  std::shared_ptr<const CMatrix> theta0_;
};

// Von Neumann (M_n, M_d)-bimodule in concrete form: the elements are all of
// Hom(C^d, C^K) (K x d matrices), the right action is matrix multiplication,
// the left action is x -> pi(a) x through the trivializer, and the M_d
// valued inner product is <x, y> = x^* y.  Every module produced by the
// constructions below is of this shape with the ambient trimmed to the
// column span, so the type never stores a proper subspace.
class VnBimodule {
 public:
  VnBimodule() = default;
  VnBimodule(std::size_t right_d, Trivializer theta);

  std::size_t left_dim() const { return theta_.n(); }     // n
  std::size_t right_dim() const { return right_d_; }      // d
  std::size_t ambient_dim() const { return theta_.dim(); }  // K
  std::size_t module_dim() const { return ambient_dim() * right_d_; }
  const Trivializer& theta() const { return theta_; }

  CMatrix left_act(const CMatrix& a, const CMatrix& x) const;
  CMatrix inner(const CMatrix& x, const CMatrix& y) const;  // x^* y
  CMatrix pi_unit(std::size_t p, std::size_t q) const;
  // Canonical orthonormal basis (ambient matrix units); guarded.
  std::vector<CMatrix> canonical_basis() const;
  bool accepts(const CMatrix& x) const {
    return x.rows() == ambient_dim() && x.cols() == right_d_;
  }
  bool same_as(const VnBimodule& o) const;

 private:
  std::size_t right_d_ = 0;
  Trivializer theta_;
};

// Element tagged with its parent module.
struct ModuleVector {
  VnBimodule parent;
  CMatrix m;
};

// <x, y> = x^* y; ParentMismatch when the parents differ.
CMatrix inner_product(const ModuleVector& x, const ModuleVector& y);

// Right-linear (adjointable) module map E -> F stored in compact form: the
// K_F x K_E matrix acting by left multiplication on elements.  The map is
// bilinear (left-linear as well) exactly when the matrix intertwines the two
// left representations; `bilinearity_residual` measures that.
struct BilinearMap {
  VnBimodule source;
  VnBimodule target;
  CMatrix mat;

  CMatrix apply(const CMatrix& x) const { return mat * x; }
  BilinearMap adjoint() const { return {target, source, mat.adjoint()}; }
};

double isometry_residual(const CMatrix& mat);
// Relative residual of theta_dst mat theta_src^* against I_n (x) s; zero
// for maps commuting with the left actions.
double bilinearity_residual(const VnBimodule& src, const VnBimodule& dst,
                            const CMatrix& mat);

// Multiplicity descent: for a left-linear S: K_src -> K_dst recover s with
// theta_dst S = (I_n (x) s) theta_src.
struct MuDescent {
  CMatrix s;        // mu_dst x mu_src
  double residual;  // deviation from block-scalar form (relative)
};
MuDescent mu_descend(const Trivializer& src, const Trivializer& dst,
                     const CMatrix& mat);

// GNS module of a CP map: E = Hom(C^d, C^{n r}) with left action a (x) I_r
// and cyclic vector the minimal Stinespring operator, so <xi, a xi> = phi(a).
struct GnsModule {
  VnBimodule module;
  CMatrix xi;
};

GnsModule gns_module(const CpMap& phi);
// The algebra M_d as the trivial (M_d, M_d)-bimodule with unit cyclic vector.
GnsModule trivial_module(std::size_t d);

// Interior tensor product over the shared middle algebra.  The result's
// elements factor through (x (.) y) = (x (x) I_mu) theta_F y.
struct TensorProduct {
  VnBimodule left;    // E over (A, B)
  VnBimodule right;   // F over (B, C)
  VnBimodule module;  // E (.) F over (A, C)

  CMatrix factor(const CMatrix& x, const CMatrix& y) const;
  // Tensor of module maps: (S (.) T) acting E (.) F -> E' (.) F'.
  // Computed as kron(S, mu-descent of T).
};
TensorProduct tensor(const VnBimodule& e, const VnBimodule& f);

// kron(s_mat_on_E, mu-descent of t_mat_on_F): matrix of S (.) T between the
// two tensor modules.  `residual` reports how far T was from left-linear.
struct TensorMap {
  CMatrix mat;
  double residual;
};
TensorMap tensor_map(const CMatrix& s_mat, const VnBimodule& f_src,
                     const VnBimodule& f_dst, const CMatrix& t_mat);

// Corner module of a module over (A, M_2(B)): same ambient space, elements
// compress to K x d by summing the two right column blocks.  The class map
// is x -> x_1 + x_2; the left action is unchanged.
struct CornerModule {
  VnBimodule module;  // over (A, B)
  std::size_t block_d;
  CMatrix classof(const CMatrix& x) const;
};
CornerModule corner_module(const VnBimodule& f);

// Restrict the left algebra M_{2n} to M_n acting through a -> diag(a, a).
VnBimodule restrict_left_diag(const VnBimodule& f, double tol);

// Orthogonal projection onto the right-closure of span(S), returned as a
// K x K matrix acting by left multiplication.  Throws NotSubmodule when
// span(S) itself is not right-closed.
CMatrix submodule_projection(const VnBimodule& e,
                             const std::vector<CMatrix>& span, double tol);

// Compress (module, cyclic vector) to the cyclic submodule spanned by
// pi(a) xi b.  embed is the K x m isometry of the compressed ambient.
struct GnsCompression {
  VnBimodule module;
  CMatrix xi;
  CMatrix embed;
};
GnsCompression compress_to_cyclic(const VnBimodule& mod, const CMatrix& xi,
                                  double tol);

// Solve for the intertwiner sending the cyclic vector of (src, xi_src) to
// xi_dst, extended by two-sided linearity over the spanning set
// {pi(E_pq) xi e_l}; least squares through the pseudoinverse.
struct BilinearSolve {
  CMatrix mat;
  double residual;
};
BilinearSolve solve_intertwiner_on_cyclic(const VnBimodule& src,
                                          const CMatrix& xi_src,
                                          const VnBimodule& dst,
                                          const CMatrix& xi_dst, double tol);

}  // namespace bqds
