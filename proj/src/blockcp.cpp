#include "bqds/blockcp.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "bqds/random.hpp"

namespace bqds {

namespace {

CMatrix corner_of(const CMatrix& m, std::size_t i, std::size_t j,
                  std::size_t r, std::size_t c) {
  return m.block(i * r, j * c, r, c);
}

CMatrix embed_corner(std::size_t i, std::size_t j, std::size_t r,
                     std::size_t c, const CMatrix& b) {
  CMatrix out(2 * r, 2 * c);
  out.set_block(i * r, j * c, b);
  return out;
}

double map_scale(const MatrixUnitMap& f) {
  double s = 1.0;
  for (const CMatrix& m : f.images) s = std::max(s, m.max_abs());
  return s;
}

// psi(a) = <x_1, T(a x_2)>.
CMatrix psi_value(const GnsModule& g1, const GnsModule& g2,
                  const CMatrix& t_mat, const CMatrix& a) {
  return g1.xi.adjoint() * (t_mat * g2.module.left_act(a, g2.xi));
}

double reconstruction_residual(const MatrixUnitMap& psi, const GnsModule& g1,
                               const GnsModule& g2, const CMatrix& t_mat) {
  const std::size_t n = psi.n;
  double worst = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const CMatrix a = matrix_unit(n, p, q);
      worst = std::max(worst, max_abs_diff(psi.images[p * n + q],
                                           psi_value(g1, g2, t_mat, a)));
    }
  return worst / map_scale(psi);
}

void check_gns_reproduces(const CpMap& phi, const GnsModule& g, double tol,
                          const char* which) {
  if (g.module.left_dim() != phi.in_dim() ||
      g.module.right_dim() != phi.out_dim())
    throw Error(ErrorKind::DimMismatch,
                std::string("gns module dimensions do not fit ") + which);
  const std::size_t n = phi.in_dim();
  double worst = 0.0;
  double scale = 1.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const CMatrix a = matrix_unit(n, p, q);
      const CMatrix lhs = g.module.inner(g.xi, g.module.left_act(a, g.xi));
      const CMatrix rhs = phi.apply(a);
      worst = std::max(worst, max_abs_diff(lhs, rhs));
      scale = std::max(scale, rhs.max_abs());
    }
  if (worst > tol * scale)
    throw Error(ErrorKind::InvalidConfig,
                std::string(which) + " does not reproduce its map", worst);
}

// Kraus family of A -> W^* M_2(pi_E)(A) W with W = diag(top, bot); both
// columns live in E.  Through the trivializer, M_2(pi_E) is conjugation of
// the amplification A (x) I_mu by I_2 (x) theta, so the Kraus slices come
// from the rows of (I_2 (x) theta) W.
std::vector<CMatrix> pair_compression_kraus(const VnBimodule& e,
                                            const CMatrix& top,
                                            const CMatrix& bot) {
  const std::size_t n = e.left_dim();
  const std::size_t d = e.right_dim();
  const std::size_t mu = e.theta().mu();
  const CMatrix vt = e.theta().apply(top);
  const CMatrix vb = e.theta().apply(bot);
  std::vector<CMatrix> kraus;
  kraus.reserve(mu);
  for (std::size_t k = 0; k < mu; ++k) {
    CMatrix kk(2 * n, 2 * d);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t x = 0; x < d; ++x) {
        kk(p, x) = vt(p * mu + k, x);
        kk(n + p, d + x) = vb(p * mu + k, x);
      }
    kraus.push_back(std::move(kk));
  }
  return kraus;
}

MatrixUnitMap images_of_kraus(std::size_t n, std::size_t d,
                              const std::vector<CMatrix>& kraus) {
  return MatrixUnitMap::from_function(n, d, [&](const CMatrix& a) {
    CMatrix out(d, d);
    for (const CMatrix& k : kraus) out += k.adjoint() * (a * k);
    return out;
  });
}

}  // namespace

BlockCpMap verify_block(const CpMap& full, double tol) {
  if (full.in_dim() % 2 != 0 || full.out_dim() % 2 != 0)
    throw Error(ErrorKind::GradingMismatch,
                "block split needs even dimensions");
  const std::size_t n = full.in_dim() / 2;
  const std::size_t d = full.out_dim() / 2;
  MatrixUnitMap comp[2][2];
  for (auto& row : comp)
    for (auto& f : row) {
      f.n = n;
      f.d = d;
      f.images.assign(n * n, CMatrix(d, d));
    }
  double scale = 1.0;
  double leak = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
          const CMatrix img =
              full.apply(embed_corner(i, j, n, n, matrix_unit(n, p, q)));
          for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t l = 0; l < 2; ++l) {
              const CMatrix blk = corner_of(img, k, l, d, d);
              if (k == i && l == j) {
                scale = std::max(scale, blk.max_abs());
                comp[i][j].images[p * n + q] = blk;
              } else {
                leak = std::max(leak, blk.max_abs());
              }
            }
        }
  if (leak > tol * scale)
    throw Error(ErrorKind::NotBlock, "off-corner leakage", leak);
  const double sym = map_distance(comp[1][0], adjoint_map(comp[0][1]));
  if (sym > tol * scale)
    throw Error(ErrorKind::NotBlock,
                "off-diagonal corners are not mutually adjoint", sym);
  return BlockCpMap{n, d, full,
                    CpMap::from_choi(n, d, comp[0][0].choi(), tol * scale),
                    CpMap::from_choi(n, d, comp[1][1].choi(), tol * scale),
                    std::move(comp[0][1])};
}

ContractionSummands build_summands(const GnsModule& gns1,
                                   const GnsModule& gns2,
                                   const CMatrix& t_mat, double tol) {
  if (t_mat.rows() != gns1.module.ambient_dim() ||
      t_mat.cols() != gns2.module.ambient_dim())
    throw Error(ErrorKind::ShapeMismatch, "contraction matrix shape");
  if (gns1.module.left_dim() != gns2.module.left_dim() ||
      gns1.module.right_dim() != gns2.module.right_dim())
    throw Error(ErrorKind::DimMismatch, "modules over different algebras");
  const std::size_t n = gns1.module.left_dim();
  const std::size_t d = gns1.module.right_dim();

  const CMatrix y = t_mat * gns2.xi;
  const CMatrix defect =
      CMatrix::identity(gns2.module.ambient_dim()) - t_mat.adjoint() * t_mat;
  const CMatrix z = psd_sqrt(defect, tol) * gns2.xi;
  const CMatrix zero_top(gns2.module.ambient_dim(), d);

  ContractionSummands out;
  out.pair_kraus = pair_compression_kraus(gns1.module, gns1.xi, y);
  out.defect_kraus = pair_compression_kraus(gns2.module, zero_top, z);
  out.pair_part = images_of_kraus(2 * n, 2 * d, out.pair_kraus);
  out.defect_part = images_of_kraus(2 * n, 2 * d, out.defect_kraus);
  return out;
}

MatrixUnitMap block_images_from_contraction(const CpMap& phi1,
                                            const CpMap& phi2,
                                            const GnsModule& gns1,
                                            const GnsModule& gns2,
                                            const CMatrix& t_mat) {
  const std::size_t n = phi1.in_dim();
  const std::size_t d = phi1.out_dim();
  MatrixUnitMap out;
  out.n = 2 * n;
  out.d = 2 * d;
  out.images.assign(4 * n * n, CMatrix(2 * d, 2 * d));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
          const CMatrix a = matrix_unit(n, p, q);
          CMatrix blk;
          if (i == 0 && j == 0) {
            blk = phi1.apply(a);
          } else if (i == 1 && j == 1) {
            blk = phi2.apply(a);
          } else if (i == 0 && j == 1) {
            blk = psi_value(gns1, gns2, t_mat, a);
          } else {
            blk = psi_value(gns1, gns2, t_mat, matrix_unit(n, q, p)).adjoint();
          }
          out.images[(i * n + p) * 2 * n + (j * n + q)] =
              embed_corner(i, j, d, d, blk);
        }
  return out;
}

BlockCpMap build_from_contraction(const CpMap& phi1, const CpMap& phi2,
                                  const GnsModule& gns1,
                                  const GnsModule& gns2, const BilinearMap& t,
                                  const Tolerances& tol) {
  if (!t.source.same_as(gns2.module) || !t.target.same_as(gns1.module))
    throw Error(ErrorKind::DimMismatch,
                "contraction frames are not the supplied modules");
  if (phi1.in_dim() != phi2.in_dim() || phi1.out_dim() != phi2.out_dim())
    throw Error(ErrorKind::DimMismatch,
                "diagonal components must share dimensions");
  check_gns_reproduces(phi1, gns1, tol.verify, "gns1");
  check_gns_reproduces(phi2, gns2, tol.verify, "gns2");
  const double lin = bilinearity_residual(t.source, t.target, t.mat);
  if (lin > tol.verify)
    throw Error(ErrorKind::NotBilinear,
                "contraction does not intertwine the left actions", lin);
  const double nrm = operator_norm(t.mat);
  if (nrm > 1.0 + kContractionSlack)
    throw Error(ErrorKind::NotContraction, "operator norm exceeds 1", nrm);

  const ContractionSummands parts = build_summands(gns1, gns2, t.mat, tol.build);
  std::vector<CMatrix> all = parts.pair_kraus;
  all.insert(all.end(), parts.defect_kraus.begin(), parts.defect_kraus.end());
  const std::size_t n = phi1.in_dim();
  const std::size_t d = phi1.out_dim();
  const CpMap full = CpMap::from_kraus(2 * n, 2 * d, all, tol.build);

  const MatrixUnitMap target =
      block_images_from_contraction(phi1, phi2, gns1, gns2, t.mat);
  const double dev = map_distance(full.as_unit_map(), target) / map_scale(target);
  if (dev > tol.verify)
    throw Error(ErrorKind::Inconsistent,
                "assembled map deviates from its corner data", dev);
  return verify_block(full, tol.build);
}

ContractionReport extract_contraction_module_given(const BlockCpMap& b,
                                                   const GnsModule& gns1,
                                                   const GnsModule& gns2,
                                                   const Tolerances& tol) {
  check_gns_reproduces(b.phi1, gns1, tol.verify, "gns1");
  check_gns_reproduces(b.phi2, gns2, tol.verify, "gns2");
  const std::size_t n = b.n;
  const std::size_t d = b.d;

  // Two-sided GNS module of the full map; its trivializer is exact, so the
  // left action is literally A (x) I_R.
  const GnsModule g = gns_module(b.full);
  const std::size_t half = g.module.ambient_dim() / 2;
  const std::size_t bigr = half / n;

  // The cyclic vector of a block map carries no off-diagonal mass.
  const double cross = std::max(g.xi.block(0, d, half, d).max_abs(),
                                g.xi.block(half, 0, half, d).max_abs());
  if (cross > tol.verify * std::max(1.0, g.xi.max_abs()))
    throw Error(ErrorKind::NotBlock,
                "full GNS vector has off-diagonal mass", cross);
  const CMatrix s1 = g.xi.block(0, 0, half, d);
  const CMatrix s2 = g.xi.block(half, d, half, d);

  // Diagonal corner pieces, rows trimmed to each half: the restricted left
  // action of a (through diag(a, a)) is the exact amplification a (x) I_R,
  // and compressing the corner classes gives GNS data for the phi_i.
  const VnBimodule f1(d, Trivializer::exact(n, bigr));
  const VnBimodule f2(d, Trivializer::exact(n, bigr));

  // Transport along the off-diagonal unit: rows of block 2 to rows of
  // block 1.  In the trimmed frame this is the identity; computed anyway.
  CMatrix e12(2 * n, 2 * n);
  for (std::size_t p = 0; p < n; ++p) e12(p, n + p) = cplx{1.0, 0.0};
  const CMatrix u =
      g.module.theta().pi(e12).block(0, half, half, half);

  const GnsCompression c1 = compress_to_cyclic(f1, s1, tol.build);
  const GnsCompression c2 = compress_to_cyclic(f2, s2, tol.build);
  const CMatrix t_small = c1.embed.adjoint() * (u * c2.embed);

  // Identify the compressed pieces with the supplied modules.
  const BilinearSolve v1 = solve_intertwiner_on_cyclic(gns1.module, gns1.xi,
                                                       c1.module, c1.xi,
                                                       tol.build);
  const BilinearSolve v2 = solve_intertwiner_on_cyclic(gns2.module, gns2.xi,
                                                       c2.module, c2.xi,
                                                       tol.build);
  const CMatrix t_mat = v1.mat.adjoint() * (t_small * v2.mat);

  ContractionReport rep;
  rep.t = BilinearMap{gns2.module, gns1.module, t_mat};
  rep.s = mu_descend(gns2.module.theta(), gns1.module.theta(), t_mat).s;
  rep.operator_norm = operator_norm(t_mat);
  rep.intertwining_residual =
      bilinearity_residual(gns2.module, gns1.module, t_mat);
  rep.reconstruction_residual =
      reconstruction_residual(b.psi, gns1, gns2, t_mat);
  return rep;
}

ContractionReport extract_contraction_module(const BlockCpMap& b,
                                             const Tolerances& tol) {
  return extract_contraction_module_given(b, gns_module(b.phi1),
                                          gns_module(b.phi2), tol);
}

ContractionReport extract_contraction_stinespring(const BlockCpMap& b,
                                                  const Tolerances& tol) {
  const GnsModule g1 = gns_module(b.phi1);
  const GnsModule g2 = gns_module(b.phi2);
  const std::size_t n = b.n;
  const std::size_t d = b.d;
  const std::size_t r1 = g1.module.theta().mu();
  const std::size_t r2 = g2.module.theta().mu();

  // psi(E_pq)(x, y) = sum_{k,l} conj(v1[(p,k), x]) s(k, l) v2[(q,l), y]
  // for T = 1_n (x) s; one linear equation per (p, q, x, y).
  CMatrix m(n * n * d * d, r1 * r2);
  CMatrix rhs(n * n * d * d, 1);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y) {
          const std::size_t row = ((p * n + q) * d + x) * d + y;
          rhs(row, 0) = b.psi.images[p * n + q](x, y);
          for (std::size_t k = 0; k < r1; ++k)
            for (std::size_t l = 0; l < r2; ++l)
              m(row, k * r2 + l) =
                  std::conj(g1.xi(p * r1 + k, x)) * g2.xi(q * r2 + l, y);
        }
  const CMatrix sol = pinv(m, tol.build) * rhs;
  const double residual =
      (m * sol - rhs).frobenius_norm() / std::max(1.0, rhs.frobenius_norm());
  if (residual > tol.verify)
    throw Error(ErrorKind::Inconsistent,
                "no intertwining contraction reproduces the corner", residual);
  CMatrix s(r1, r2);
  for (std::size_t k = 0; k < r1; ++k)
    for (std::size_t l = 0; l < r2; ++l) s(k, l) = sol(k * r2 + l, 0);
  const double nrm = operator_norm(s);
  if (nrm > 1.0 + kContractionSlack)
    throw Error(ErrorKind::NormExceeded,
                "solved intertwiner exceeds the unit ball", nrm);

  ContractionReport rep;
  rep.t = BilinearMap{g2.module, g1.module, kron(CMatrix::identity(n), s)};
  rep.s = std::move(s);
  rep.operator_norm = nrm;
  rep.intertwining_residual =
      bilinearity_residual(g2.module, g1.module, rep.t.mat);
  rep.reconstruction_residual =
      reconstruction_residual(b.psi, g1, g2, rep.t.mat);
  return rep;
}

double cross_validate(const ContractionReport& a, const ContractionReport& b) {
  return max_abs_diff(a.t.mat, b.t.mat);
}

double uniqueness_probe(const BlockCpMap& b, std::size_t trials,
                        std::uint64_t seed) {
  Rng rng(seed);
  const GnsModule g1 = gns_module(b.phi1);
  const GnsModule g2 = gns_module(b.phi2);
  const std::size_t n = b.n;
  const std::size_t r1 = g1.module.theta().mu();
  const std::size_t r2 = g2.module.theta().mu();

  std::vector<CMatrix> recovered;
  recovered.push_back(
      extract_contraction_module_given(b, g1, g2, Tolerances{}).t.mat);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    // Rotate the multiplicity bases; the left action commutes with
    // 1_n (x) w, so the rotated pair is again GNS data for the same maps.
    const CMatrix c1 = kron(CMatrix::identity(n), random_unitary(rng, r1));
    const CMatrix c2 = kron(CMatrix::identity(n), random_unitary(rng, r2));
    const GnsModule h1{g1.module, c1 * g1.xi};
    const GnsModule h2{g2.module, c2 * g2.xi};
    const CMatrix t =
        extract_contraction_module_given(b, h1, h2, Tolerances{}).t.mat;
    recovered.push_back(c1.adjoint() * (t * c2));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < recovered.size(); ++i)
    for (std::size_t j = i + 1; j < recovered.size(); ++j)
      worst = std::max(worst, max_abs_diff(recovered[i], recovered[j]));
  return worst;
}

}  // namespace bqds
