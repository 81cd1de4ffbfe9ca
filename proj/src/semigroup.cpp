#include "bqds/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "bqds/numerics.hpp"

namespace bqds {

namespace {

std::size_t beta_index(std::size_t s, std::size_t t, std::size_t horizon) {
  return s * (horizon + 1) + t;
}

// E_ii xi E_ii with E_ii = e_ii (x) 1_d, for a module over M_{2d}.
CMatrix corner_unit(const GnsModule& g, std::size_t i) {
  const std::size_t d = g.module.left_dim() / 2;
  const CMatrix eii = kron(matrix_unit(2, i, i), CMatrix::identity(d));
  return g.module.left_act(eii, g.xi) * eii;
}

double map_scale(const MatrixUnitMap& f) {
  double s = 1.0;
  for (const CMatrix& im : f.images) s = std::max(s, im.max_abs());
  return s;
}

void check_frames(const Morphism& t, const InclusionSystem& sys1,
                  const InclusionSystem& sys2) {
  if (sys1.horizon != sys2.horizon || t.horizon != sys1.horizon ||
      t.maps.size() != t.horizon + 1)
    throw Error(ErrorKind::DimMismatch,
                "morphism horizon does not match the inclusion systems");
  for (std::size_t k = 0; k <= t.horizon; ++k)
    if (!t.maps[k].source.same_as(sys2.at(k).module) ||
        !t.maps[k].target.same_as(sys1.at(k).module))
      throw Error(ErrorKind::DimMismatch,
                  "morphism fiber does not act between the two systems");
}

}  // namespace

const GnsModule& InclusionSystem::at(std::size_t t) const {
  if (t >= modules.size())
    throw Error(ErrorKind::HorizonExceeded, "module index beyond horizon");
  return modules[t];
}

const BilinearMap& InclusionSystem::beta(std::size_t s, std::size_t t) const {
  if (s + t > horizon)
    throw Error(ErrorKind::HorizonExceeded, "splitting index beyond horizon");
  return betas[beta_index(s, t, horizon)];
}

DiscreteQds make_qds(const CpMap& step, std::size_t horizon, double tol) {
  if (step.in_dim() != step.out_dim())
    throw Error(ErrorKind::DimMismatch,
                "semigroup step must be an endomorphism");
  if (horizon == 0)
    throw Error(ErrorKind::InvalidConfig, "horizon must be at least 1");
  return DiscreteQds{step, horizon, step.is_unital(tol),
                     step.is_contractive(tol)};
}

InclusionSystem inclusion_system(const DiscreteQds& qds,
                                 const Tolerances& tol) {
  InclusionSystem sys;
  sys.horizon = qds.horizon;
  sys.modules.reserve(qds.horizon + 1);
  for (std::size_t t = 0; t <= qds.horizon; ++t)
    sys.modules.push_back(gns_module(power(qds.step, t)));
  sys.betas.resize((qds.horizon + 1) * (qds.horizon + 1));

  for (std::size_t s = 0; s <= qds.horizon; ++s) {
    for (std::size_t t = 0; s + t <= qds.horizon; ++t) {
      const GnsModule& es = sys.modules[s];
      const GnsModule& et = sys.modules[t];
      const GnsModule& est = sys.modules[s + t];
      const TensorProduct tp = tensor(es.module, et.module);
      const CMatrix xi_pair = tp.factor(es.xi, et.xi);
      const BilinearSolve sol = solve_intertwiner_on_cyclic(
          est.module, est.xi, tp.module, xi_pair, tol.build);
      // The splitting exists and is isometric whenever the powers really
      // form a semigroup; a residual here means inconsistent input.
      if (sol.residual > tol.verify)
        throw Error(ErrorKind::Inconsistent,
                    "unit factorization has no linear extension",
                    sol.residual);
      const double iso = isometry_residual(sol.mat);
      if (iso > tol.verify)
        throw Error(ErrorKind::Inconsistent, "splitting map is not isometric",
                    iso);
      const double bil = bilinearity_residual(est.module, tp.module, sol.mat);
      if (bil > tol.verify)
        throw Error(ErrorKind::NotBilinear,
                    "splitting map does not intertwine the left actions",
                    bil);
      sys.betas[beta_index(s, t, qds.horizon)] =
          BilinearMap{est.module, tp.module, sol.mat};
    }
  }
  return sys;
}

SystemChecks verify_inclusion_system(const InclusionSystem& sys) {
  SystemChecks out;
  for (std::size_t s = 0; s <= sys.horizon; ++s) {
    for (std::size_t t = 0; s + t <= sys.horizon; ++t) {
      const BilinearMap& b = sys.beta(s, t);
      out.isometry = std::max(out.isometry, isometry_residual(b.mat));
      out.bilinearity = std::max(
          out.bilinearity, bilinearity_residual(b.source, b.target, b.mat));
      const TensorProduct tp = tensor(sys.at(s).module, sys.at(t).module);
      out.unit = std::max(
          out.unit, max_abs_diff(b.apply(sys.at(s + t).xi),
                                 tp.factor(sys.at(s).xi, sys.at(t).xi)));
    }
  }
  for (std::size_t r = 0; r <= sys.horizon; ++r) {
    for (std::size_t s = 0; r + s <= sys.horizon; ++s) {
      for (std::size_t t = 0; r + s + t <= sys.horizon; ++t) {
        // (beta_{r,s} (.) id_t) beta_{r+s,t} vs (id_r (.) beta_{s,t})
        // beta_{r,s+t}; the two target modules coincide on the nose.
        const BilinearMap& b_rs = sys.beta(r, s);
        const BilinearMap& b_st = sys.beta(s, t);
        const TensorMap left =
            tensor_map(b_rs.mat, sys.at(t).module, sys.at(t).module,
                       CMatrix::identity(sys.at(t).module.ambient_dim()));
        const TensorMap right = tensor_map(
            CMatrix::identity(sys.at(r).module.ambient_dim()),
            b_st.source, b_st.target, b_st.mat);
        out.coassociativity = std::max(
            out.coassociativity,
            max_abs_diff(left.mat * sys.beta(r + s, t).mat,
                         right.mat * sys.beta(r, s + t).mat));
      }
    }
  }
  for (std::size_t t = 0; t <= sys.horizon; ++t) {
    const GnsCompression c =
        compress_to_cyclic(sys.at(t).module, sys.at(t).xi, 1e-9);
    out.cyclic_defect +=
        sys.at(t).module.ambient_dim() - c.module.ambient_dim();
  }
  return out;
}

std::vector<MatrixUnitMap> semigroup_from_unit(const InclusionSystem& sys) {
  std::vector<MatrixUnitMap> out;
  out.reserve(sys.horizon + 1);
  for (std::size_t t = 0; t <= sys.horizon; ++t) {
    const GnsModule& g = sys.at(t);
    out.push_back(MatrixUnitMap::from_function(
        g.module.left_dim(), g.module.right_dim(), [&](const CMatrix& a) {
          return g.module.inner(g.xi, g.module.left_act(a, g.xi));
        }));
  }
  return out;
}

double verify_morphism(const Morphism& t, const InclusionSystem& sys1,
                       const InclusionSystem& sys2, bool strong) {
  check_frames(t, sys1, sys2);
  double worst = 0.0;
  for (std::size_t s = 1; s <= t.horizon; ++s) {
    for (std::size_t u = 1; s + u <= t.horizon; ++u) {
      const TensorMap prod = tensor_map(t.maps[s].mat, sys2.at(u).module,
                                        sys1.at(u).module, t.maps[u].mat);
      const CMatrix rhs = prod.mat * sys2.beta(s, u).mat;
      const CMatrix& b1 = sys1.beta(s, u).mat;
      if (strong)
        worst = std::max(worst, max_abs_diff(b1 * t.maps[s + u].mat, rhs));
      else
        worst = std::max(
            worst, max_abs_diff(t.maps[s + u].mat, b1.adjoint() * rhs));
    }
  }
  return worst;
}

Morphism morphism_from_single(const InclusionSystem& sys1,
                              const InclusionSystem& sys2,
                              const BilinearMap& t1, const Tolerances& tol) {
  if (sys1.horizon != sys2.horizon)
    throw Error(ErrorKind::DimMismatch, "systems have different horizons");
  if (!t1.source.same_as(sys2.at(1).module) ||
      !t1.target.same_as(sys1.at(1).module))
    throw Error(ErrorKind::DimMismatch,
                "seed does not act between the two t = 1 fibers");
  const std::size_t d = sys1.at(0).module.right_dim();
  if (sys2.at(0).module.right_dim() != d)
    throw Error(ErrorKind::DimMismatch,
                "systems do not share the right algebra");
  const double bil = bilinearity_residual(t1.source, t1.target, t1.mat);
  if (bil > tol.verify)
    throw Error(ErrorKind::NotBilinear,
                "seed does not intertwine the left actions", bil);

  Morphism m;
  m.horizon = sys1.horizon;
  m.maps.push_back(
      BilinearMap{sys2.at(0).module, sys1.at(0).module, CMatrix::identity(d)});
  m.maps.push_back(t1);
  for (std::size_t t = 2; t <= m.horizon; ++t) {
    const TensorMap prod = tensor_map(t1.mat, sys2.at(t - 1).module,
                                      sys1.at(t - 1).module,
                                      m.maps[t - 1].mat);
    CMatrix mat = sys1.beta(1, t - 1).mat.adjoint() *
                  (prod.mat * sys2.beta(1, t - 1).mat);
    m.maps.push_back(
        BilinearMap{sys2.at(t).module, sys1.at(t).module, std::move(mat)});
  }
  double growth = 0.0;
  for (std::size_t t = 1; t <= m.horizon; ++t)
    growth = std::max(growth, std::log(std::max(
                                  operator_norm(m.maps[t].mat), 1e-300)) /
                                  static_cast<double>(t));
  m.growth = std::max(0.0, growth);
  return m;
}

DiscreteQds block_semigroup_from_morphism(const InclusionSystem& sys1,
                                          const InclusionSystem& sys2,
                                          const Morphism& t,
                                          const Tolerances& tol) {
  check_frames(t, sys1, sys2);
  const std::vector<MatrixUnitMap> f1 = semigroup_from_unit(sys1);
  const std::vector<MatrixUnitMap> f2 = semigroup_from_unit(sys2);
  const std::size_t d = sys1.at(0).module.right_dim();

  std::vector<BlockCpMap> blocks;
  blocks.reserve(t.horizon);
  for (std::size_t k = 1; k <= t.horizon; ++k) {
    const CpMap p1 = CpMap::from_choi(d, d, f1[k].choi(), tol.build);
    const CpMap p2 = CpMap::from_choi(d, d, f2[k].choi(), tol.build);
    blocks.push_back(build_from_contraction(p1, p2, sys1.at(k), sys2.at(k),
                                            t.maps[k], tol));
  }

  double worst = 0.0;
  for (std::size_t s = 1; s <= t.horizon; ++s) {
    for (std::size_t u = 1; s + u <= t.horizon; ++u) {
      const CpMap comp = compose(blocks[u - 1].full, blocks[s - 1].full);
      const MatrixUnitMap want = blocks[s + u - 1].full.as_unit_map();
      worst = std::max(worst, map_distance(comp.as_unit_map(), want) /
                                  map_scale(want));
    }
  }
  if (worst > tol.verify)
    throw Error(ErrorKind::NotMorphism,
                "assembled block maps do not satisfy the semigroup law",
                worst);
  return make_qds(blocks[0].full, t.horizon, tol.build);
}

MorphismExtraction extract_morphism(const DiscreteQds& qds,
                                    const Tolerances& tol) {
  const BlockCpMap b1 = verify_block(qds.step, tol.build);
  const std::size_t d = b1.n;
  const InclusionSystem sys1 =
      inclusion_system(make_qds(b1.phi1, qds.horizon, tol.build), tol);
  const InclusionSystem sys2 =
      inclusion_system(make_qds(b1.phi2, qds.horizon, tol.build), tol);

  MorphismExtraction out;
  out.morphism.horizon = qds.horizon;
  out.morphism.maps.push_back(
      BilinearMap{sys2.at(0).module, sys1.at(0).module, CMatrix::identity(d)});
  for (std::size_t t = 1; t <= qds.horizon; ++t) {
    const BlockCpMap bt =
        t == 1 ? b1 : verify_block(power(qds.step, t), tol.build);
    ContractionReport rep =
        extract_contraction_module_given(bt, sys1.at(t), sys2.at(t), tol);
    out.morphism.maps.push_back(rep.t);
    out.reports.push_back(std::move(rep));
  }
  double growth = 0.0;
  for (std::size_t t = 1; t <= qds.horizon; ++t)
    growth = std::max(growth,
                      std::log(std::max(out.reports[t - 1].operator_norm,
                                        1e-300)) /
                          static_cast<double>(t));
  out.morphism.growth = std::max(0.0, growth);
  out.weak_residual = verify_morphism(out.morphism, sys1, sys2, false);

  // Units of the full system split corner by corner: the diagonal
  // compressions of xi_{s+t} factor exactly as the corresponding
  // compressions of xi_s and xi_t.
  const InclusionSystem full = inclusion_system(qds, tol);
  for (std::size_t s = 1; s <= qds.horizon; ++s) {
    for (std::size_t t = 1; s + t <= qds.horizon; ++t) {
      const TensorProduct tp =
          tensor(full.at(s).module, full.at(t).module);
      for (std::size_t i = 0; i < 2; ++i) {
        const CMatrix lhs =
            full.beta(s, t).apply(corner_unit(full.at(s + t), i));
        const CMatrix rhs = tp.factor(corner_unit(full.at(s), i),
                                      corner_unit(full.at(t), i));
        out.consistency_residual =
            std::max(out.consistency_residual, max_abs_diff(lhs, rhs));
      }
    }
  }
  return out;
}

}  // namespace bqds
