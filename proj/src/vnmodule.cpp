#include "bqds/vnmodule.hpp"

#include <string>
#include <utility>

#include "bqds/errors.hpp"
#include "bqds/numerics.hpp"

namespace bqds {

namespace {

// (a (x) I_mult) w through row-major reshapes, never materializing the kron.
CMatrix amp_apply(const CMatrix& a, std::size_t mult, const CMatrix& w) {
  const std::size_t k = a.cols(), c = w.cols();
  if (w.rows() != k * mult) throw Error(ErrorKind::ShapeMismatch, "amp_apply: inner dimensions");
  if (mult == 1) return a * w;
  CMatrix wr = w.reshaped(k, mult * c);
  CMatrix y = a * wr;
  return y.reshaped(a.rows() * mult, c);
}

bool is_identity_matrix(const CMatrix& m) {
  if (m.rows() != m.cols()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != (i == j ? cplx(1.0) : cplx(0.0))) return false;
  return true;
}

}  // namespace

void guard_ambient(std::size_t dim, std::size_t bound) {
  if (dim > bound)
    throw Error(ErrorKind::SizeGuard,
                "ambient dimension " + std::to_string(dim) + " exceeds bound " +
                    std::to_string(bound),
                static_cast<double>(dim));
}

Trivializer::Trivializer(std::size_t n, CMatrix theta0, std::size_t mult)
    : n_(n), k0_(theta0.rows()), mult_(mult) {
  if (n == 0 || mult == 0 || theta0.rows() == 0)
    throw Error(ErrorKind::InvalidConfig, "trivializer: empty dimensions");
  if (theta0.rows() != theta0.cols())
    throw Error(ErrorKind::ShapeMismatch, "trivializer: theta0 must be square");
  if (k0_ % n_ != 0)
    throw Error(ErrorKind::DimMismatch,
                "trivializer: left algebra dimension does not divide the ambient");
  if (!theta0.all_finite())
    throw Error(ErrorKind::InvalidConfig, "trivializer: non-finite entries");
  if (!is_identity_matrix(theta0)) {
    CMatrix g = theta0 * theta0.adjoint();
    for (std::size_t i = 0; i < k0_; ++i) g(i, i) -= 1.0;
    double r = g.max_abs();
    if (r > 1e-7)
      throw Error(ErrorKind::InvalidConfig, "trivializer: theta0 is not unitary", r);
  }
  theta0_ = std::make_shared<const CMatrix>(std::move(theta0));
}

Trivializer Trivializer::exact(std::size_t n, std::size_t mu) {
  return Trivializer(n, CMatrix::identity(n), mu);
}

CMatrix Trivializer::apply(const CMatrix& x) const {
  if (x.rows() != dim())
    throw Error(ErrorKind::ShapeMismatch, "trivializer apply: row count");
  return amp_apply(*theta0_, mult_, x);
}

CMatrix Trivializer::apply_adjoint(const CMatrix& y) const {
  if (y.rows() != dim())
    throw Error(ErrorKind::ShapeMismatch, "trivializer apply_adjoint: row count");
  return amp_apply(theta0_->adjoint(), mult_, y);
}

CMatrix Trivializer::left_act(const CMatrix& a, const CMatrix& x) const {
  if (a.rows() != n_ || a.cols() != n_)
    throw Error(ErrorKind::DimMismatch, "left action: algebra element size");
  return apply_adjoint(amp_apply(a, mu(), apply(x)));
}

CMatrix Trivializer::pi(const CMatrix& a) const {
  if (dim() > kDenseGuard)
    throw Error(ErrorKind::SizeGuard, "dense representation image refused",
                static_cast<double>(dim()));
  return left_act(a, CMatrix::identity(dim()));
}

CMatrix Trivializer::pi_unit(std::size_t p, std::size_t q) const {
  return pi(matrix_unit(n_, p, q));
}

CMatrix Trivializer::materialize() const {
  if (dim() > kDenseGuard)
    throw Error(ErrorKind::SizeGuard, "dense trivializer refused",
                static_cast<double>(dim()));
  return apply(CMatrix::identity(dim()));
}

Trivializer Trivializer::tensor_extend(std::size_t extra) const {
  if (extra == 0) throw Error(ErrorKind::InvalidConfig, "tensor_extend: zero factor");
  guard_ambient(dim() * extra);
  Trivializer t;
  t.n_ = n_;
  t.k0_ = k0_;
  t.mult_ = mult_ * extra;
  t.theta0_ = theta0_;
  return t;
}

Trivializer Trivializer::from_rep_units(std::size_t n,
                                        const std::vector<CMatrix>& units,
                                        double tol) {
  if (n == 0 || units.size() != n * n)
    throw Error(ErrorKind::InvalidConfig, "from_rep_units: expected n^2 unit images");
  const std::size_t k = units[0].rows();
  double scale = 1.0;
  for (const auto& u : units) {
    if (u.rows() != k || u.cols() != k)
      throw Error(ErrorKind::ShapeMismatch, "from_rep_units: images must be square of one size");
    scale = std::max(scale, u.max_abs());
  }
  // Unitality: sum of the diagonal unit images is the ambient identity.
  CMatrix s(k, k);
  for (std::size_t p = 0; p < n; ++p) s += units[p * n + p];
  for (std::size_t i = 0; i < k; ++i) s(i, i) -= 1.0;
  if (s.max_abs() > tol * scale * static_cast<double>(n))
    throw Error(ErrorKind::InvalidConfig, "from_rep_units: representation is not unital",
                s.max_abs());

  // Multiplicity space: an orthonormal basis of range pi(E_00).
  std::vector<CMatrix> cols;
  cols.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    CMatrix c = units[0].col(j);
    if (c.max_abs() > tol * scale) cols.push_back(c);
  }
  if (cols.empty())
    throw Error(ErrorKind::InvalidConfig, "from_rep_units: pi(E_00) vanishes");
  std::vector<CMatrix> basis = orthonormal_span(cols, tol);
  const std::size_t mu = basis.size();
  if (n * mu != k)
    throw Error(ErrorKind::DimMismatch,
                "from_rep_units: representation is degenerate (n*mu != K)",
                static_cast<double>(n * mu));

  // Columns of theta^*: pi(E_p0) u_alpha at slot (p, alpha).
  CMatrix theta_adj(k, n * mu);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t a = 0; a < mu; ++a) {
      CMatrix v = units[p * n + 0] * basis[a];
      theta_adj.set_block(0, p * mu + a, v);
    }
  CMatrix theta = theta_adj.adjoint();

  // Certify: theta pi(E_pq) = (E_pq (x) I_mu) theta for every unit.
  double worst = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      CMatrix lhs = theta * units[p * n + q];
      CMatrix rhs(n * mu, k);
      rhs.set_block(p * mu, 0, theta.block(q * mu, 0, mu, k));
      worst = std::max(worst, max_abs_diff(lhs, rhs));
    }
  if (worst > std::max(tol, 1e-10) * scale * static_cast<double>(n))
    throw Error(ErrorKind::InvalidConfig,
                "from_rep_units: images do not form a *-representation", worst);

  return Trivializer(n, std::move(theta), 1);
}

VnBimodule::VnBimodule(std::size_t right_d, Trivializer theta)
    : right_d_(right_d), theta_(std::move(theta)) {
  if (right_d_ == 0) throw Error(ErrorKind::InvalidConfig, "module: empty right algebra");
  guard_ambient(theta_.dim());
}

CMatrix VnBimodule::left_act(const CMatrix& a, const CMatrix& x) const {
  if (!accepts(x)) throw Error(ErrorKind::ShapeMismatch, "left_act: element shape");
  return theta_.left_act(a, x);
}

CMatrix VnBimodule::inner(const CMatrix& x, const CMatrix& y) const {
  if (!accepts(x) || !accepts(y))
    throw Error(ErrorKind::ShapeMismatch, "inner: element shape");
  return x.adjoint() * y;
}

CMatrix VnBimodule::pi_unit(std::size_t p, std::size_t q) const {
  return theta_.pi_unit(p, q);
}

std::vector<CMatrix> VnBimodule::canonical_basis() const {
  if (module_dim() > kDenseGuard)
    throw Error(ErrorKind::SizeGuard, "canonical basis refused",
                static_cast<double>(module_dim()));
  std::vector<CMatrix> b;
  b.reserve(module_dim());
  for (std::size_t i = 0; i < ambient_dim(); ++i)
    for (std::size_t l = 0; l < right_d_; ++l)
      b.push_back(matrix_unit_rect(ambient_dim(), right_d_, i, l));
  return b;
}

bool VnBimodule::same_as(const VnBimodule& o) const {
  if (right_d_ != o.right_d_ || theta_.n() != o.theta_.n() ||
      theta_.dim() != o.theta_.dim() || theta_.mult() != o.theta_.mult())
    return false;
  if (&theta_.theta0() == &o.theta_.theta0()) return true;
  return max_abs_diff(theta_.theta0(), o.theta_.theta0()) <= 1e-12;
}

CMatrix inner_product(const ModuleVector& x, const ModuleVector& y) {
  if (!x.parent.same_as(y.parent))
    throw Error(ErrorKind::ParentMismatch, "inner_product: elements of different modules");
  if (!x.parent.accepts(x.m) || !y.parent.accepts(y.m))
    throw Error(ErrorKind::ShapeMismatch, "inner_product: element shape");
  return x.parent.inner(x.m, y.m);
}

double isometry_residual(const CMatrix& mat) {
  CMatrix g = mat.adjoint() * mat;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return g.max_abs();
}

MuDescent mu_descend(const Trivializer& src, const Trivializer& dst,
                     const CMatrix& mat) {
  if (src.n() != dst.n())
    throw Error(ErrorKind::DimMismatch, "mu_descend: left algebras differ");
  if (mat.rows() != dst.dim() || mat.cols() != src.dim())
    throw Error(ErrorKind::ShapeMismatch, "mu_descend: map shape");
  const std::size_t n = src.n(), ms = src.mu(), md = dst.mu();
  CMatrix c = dst.apply(mat);
  c = src.apply(c.adjoint()).adjoint();  // theta_dst mat theta_src^*
  CMatrix s(md, ms);
  for (std::size_t p = 0; p < n; ++p) s += c.block(p * md, p * ms, md, ms);
  s *= cplx(1.0 / static_cast<double>(n));
  double worst = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      CMatrix blk = c.block(p * md, q * ms, md, ms);
      if (p == q) blk -= s;
      worst = std::max(worst, blk.max_abs());
    }
  return {std::move(s), worst / std::max(1.0, c.max_abs())};
}

double bilinearity_residual(const VnBimodule& src, const VnBimodule& dst,
                            const CMatrix& mat) {
  return mu_descend(src.theta(), dst.theta(), mat).residual;
}

GnsModule gns_module(const CpMap& phi) {
  StinespringRep rep = minimal_stinespring(phi);
  VnBimodule mod(phi.out_dim(), Trivializer::exact(rep.n, rep.r));
  return {std::move(mod), rep.v};
}

GnsModule trivial_module(std::size_t d) {
  return {VnBimodule(d, Trivializer::exact(d, 1)), CMatrix::identity(d)};
}

TensorProduct tensor(const VnBimodule& e, const VnBimodule& f) {
  if (e.right_dim() != f.left_dim())
    throw Error(ErrorKind::DimMismatch,
                "tensor: right algebra of the first factor must match the left "
                "algebra of the second");
  TensorProduct t;
  t.left = e;
  t.right = f;
  t.module = VnBimodule(f.right_dim(), e.theta().tensor_extend(f.theta().mu()));
  return t;
}

CMatrix TensorProduct::factor(const CMatrix& x, const CMatrix& y) const {
  if (!left.accepts(x) || !right.accepts(y))
    throw Error(ErrorKind::ShapeMismatch, "tensor factor: element shapes");
  return amp_apply(x, right.theta().mu(), right.theta().apply(y));
}

TensorMap tensor_map(const CMatrix& s_mat, const VnBimodule& f_src,
                     const VnBimodule& f_dst, const CMatrix& t_mat) {
  MuDescent d = mu_descend(f_src.theta(), f_dst.theta(), t_mat);
  return {kron(s_mat, d.s), d.residual};
}

CMatrix CornerModule::classof(const CMatrix& x) const {
  const std::size_t k = module.ambient_dim();
  if (x.rows() != k || x.cols() != 2 * block_d)
    throw Error(ErrorKind::ShapeMismatch, "corner class map: element shape");
  CMatrix a = x.block(0, 0, k, block_d);
  a += x.block(0, block_d, k, block_d);
  return a;
}

CornerModule corner_module(const VnBimodule& f) {
  if (f.right_dim() % 2 != 0)
    throw Error(ErrorKind::GradingMismatch,
                "corner module: right algebra is not 2x2 block graded");
  const std::size_t d = f.right_dim() / 2;
  return {VnBimodule(d, f.theta()), d};
}

VnBimodule restrict_left_diag(const VnBimodule& f, double tol) {
  if (f.left_dim() % 2 != 0)
    throw Error(ErrorKind::GradingMismatch,
                "left restriction: left algebra is not 2x2 block graded");
  const std::size_t n = f.left_dim() / 2;
  const CMatrix i2 = CMatrix::identity(2);
  std::vector<CMatrix> units;
  units.reserve(n * n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      units.push_back(f.theta().pi(kron(i2, matrix_unit(n, p, q))));
  return VnBimodule(f.right_dim(), Trivializer::from_rep_units(n, units, tol));
}

CMatrix submodule_projection(const VnBimodule& e,
                             const std::vector<CMatrix>& span, double tol) {
  const std::size_t k = e.ambient_dim(), d = e.right_dim();
  if (span.empty()) return CMatrix(k, k);
  std::vector<CMatrix> cols;
  std::vector<CMatrix> flats;
  for (const auto& x : span) {
    if (!e.accepts(x))
      throw Error(ErrorKind::ShapeMismatch, "submodule_projection: element shape");
    flats.push_back(vec(x));
    for (std::size_t j = 0; j < d; ++j) cols.push_back(x.col(j));
  }
  std::vector<CMatrix> basis = orthonormal_span(cols, tol);
  CMatrix stacked(k * d, flats.size());
  for (std::size_t j = 0; j < flats.size(); ++j) stacked.set_block(0, j, flats[j]);
  const std::size_t r1 = rank(stacked, tol);
  if (r1 != basis.size() * d)
    throw Error(ErrorKind::NotSubmodule,
                "span is not closed under the right action",
                static_cast<double>(basis.size() * d - r1));
  CMatrix p(k, k);
  for (const auto& u : basis) p += u * u.adjoint();
  return p;
}

GnsCompression compress_to_cyclic(const VnBimodule& mod, const CMatrix& xi,
                                  double tol) {
  if (!mod.accepts(xi))
    throw Error(ErrorKind::ShapeMismatch, "compress_to_cyclic: cyclic vector shape");
  const std::size_t n = mod.left_dim(), k = mod.ambient_dim();
  std::vector<CMatrix> cols;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      CMatrix a = mod.left_act(matrix_unit(n, p, q), xi);
      for (std::size_t l = 0; l < mod.right_dim(); ++l) {
        CMatrix c = a.col(l);
        if (c.max_abs() > tol) cols.push_back(c);
      }
    }
  if (cols.empty())
    throw Error(ErrorKind::EmptySpan, "compress_to_cyclic: cyclic vector generates nothing");
  std::vector<CMatrix> basis = orthonormal_span(cols, tol);
  const std::size_t m = basis.size();
  CMatrix embed(k, m);
  for (std::size_t j = 0; j < m; ++j) embed.set_block(0, j, basis[j]);
  std::vector<CMatrix> units;
  units.reserve(n * n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      CMatrix img = mod.theta().left_act(matrix_unit(n, p, q), embed);
      units.push_back(embed.adjoint() * img);
    }
  VnBimodule small(mod.right_dim(), Trivializer::from_rep_units(n, units, tol));
  CMatrix xi_c = embed.adjoint() * xi;
  return {std::move(small), std::move(xi_c), std::move(embed)};
}

BilinearSolve solve_intertwiner_on_cyclic(const VnBimodule& src,
                                          const CMatrix& xi_src,
                                          const VnBimodule& dst,
                                          const CMatrix& xi_dst, double tol) {
  if (src.left_dim() != dst.left_dim() || src.right_dim() != dst.right_dim())
    throw Error(ErrorKind::DimMismatch, "intertwiner solve: algebra sizes differ");
  if (!src.accepts(xi_src) || !dst.accepts(xi_dst))
    throw Error(ErrorKind::ShapeMismatch, "intertwiner solve: cyclic vector shapes");
  const std::size_t n = src.left_dim(), d = src.right_dim();
  CMatrix sf(src.ambient_dim(), n * n * d);
  CMatrix se(dst.ambient_dim(), n * n * d);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      CMatrix unit = matrix_unit(n, p, q);
      CMatrix a = src.left_act(unit, xi_src);
      CMatrix b = dst.left_act(unit, xi_dst);
      for (std::size_t l = 0; l < d; ++l) {
        sf.set_block(0, (p * n + q) * d + l, a.col(l));
        se.set_block(0, (p * n + q) * d + l, b.col(l));
      }
    }
  CMatrix mat = se * pinv(sf, tol);
  CMatrix res = mat * sf;
  res -= se;
  double rel = res.frobenius_norm() / std::max(1.0, se.frobenius_norm());
  return {std::move(mat), rel};
}

}  // namespace bqds
