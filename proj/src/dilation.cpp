#include "bqds/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "bqds/numerics.hpp"
#include "bqds/random.hpp"

namespace bqds {

namespace {

bool is_diagonal_projection(const CMatrix& p) {
  if (p.rows() != p.cols()) return false;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < p.cols(); ++j) {
      const cplx v = p(i, j);
      if (i != j) {
        if (std::abs(v) != 0.0) return false;
      } else if (v != cplx{0.0, 0.0} && v != cplx{1.0, 0.0}) {
        return false;
      }
    }
  }
  return true;
}

double map_scale(const MatrixUnitMap& f) {
  double s = 1.0;
  for (const CMatrix& im : f.images) s = std::max(s, im.max_abs());
  return s;
}

// pi(q) on cal E_s: kron(q, 1_mu).
CMatrix left_proj(const DilationHorizon& dil, const CMatrix& q,
                  std::size_t s) {
  return kron(q, CMatrix::identity(dil.ps.fiber(s).module.theta().mu()));
}

}  // namespace

DilationHorizon make_dilation(const CpMap& step, std::size_t horizon,
                              const CMatrix& p, const Tolerances& tol) {
  if (step.in_dim() != step.out_dim())
    throw Error(ErrorKind::DimMismatch,
                "dilation step must be an endomorphism");
  if (!step.is_unital(tol.build))
    throw Error(ErrorKind::NotUnital, "dilation requires a unital step");
  const std::size_t m = step.in_dim();
  if (!is_diagonal_projection(p) || p.rows() != m)
    throw Error(ErrorKind::InvalidConfig,
                "block projection must be 0/1 diagonal in the base algebra");
  const CMatrix pp = CMatrix::identity(m) - p;

  // Block property: compressing by the complementary corner of the image
  // must annihilate each corner of the domain.
  const MatrixUnitMap f = step.as_unit_map();
  const double scale = map_scale(f);
  const CMatrix* qs[2] = {&p, &pp};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      double leak = 0.0;
      for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = 0; y < m; ++y) {
          const CMatrix im =
              f.apply(*qs[i] * matrix_unit(m, x, y) * *qs[j]);
          leak = std::max(leak, max_abs_diff(im, *qs[i] * im * *qs[j]));
        }
      }
      if (leak > tol.build * scale)
        throw Error(ErrorKind::NotBlock,
                    "step does not respect the projection's corners",
                    leak / scale);
    }
  }
  // A unital block step fixes both diagonal projections.
  const double fixed = std::max(max_abs_diff(f.apply(p), p),
                                max_abs_diff(f.apply(pp), pp));
  if (fixed > tol.verify)
    throw Error(ErrorKind::NotBlock,
                "step does not fix the block projection", fixed);

  const DiscreteQds qds = make_qds(step, horizon, tol.build);
  InclusionSystem sys = inclusion_system(qds, tol);
  ProductSystem ps = generate(sys);
  // Unit normalization <xi-hat, xi-hat> = 1 backs the isometric embeddings.
  for (std::size_t t = 0; t <= horizon; ++t) {
    const GnsModule& g = ps.fiber(t);
    const double gap =
        max_abs_diff(g.module.inner(g.xi, g.xi), CMatrix::identity(m));
    if (gap > tol.verify)
      throw Error(ErrorKind::NotUnital, "unit vector is not normalized", gap);
  }
  return DilationHorizon{horizon, qds, std::move(sys), std::move(ps), p, pp};
}

BilinearMap embedding(const DilationHorizon& dil, std::size_t s,
                      std::size_t t) {
  if (s > t || t > dil.horizon)
    throw Error(ErrorKind::HorizonExceeded, "embedding span outside horizon");
  const CMatrix mat =
      kron(dil.ps.fiber(t - s).xi,
           CMatrix::identity(dil.ps.fiber(s).module.theta().mu()));
  return BilinearMap{dil.ps.fiber(s).module, dil.ps.fiber(t).module, mat};
}

CMatrix theta(const DilationHorizon& dil, const CMatrix& a, std::size_t s,
              std::size_t t) {
  if (s + t > dil.horizon)
    throw Error(ErrorKind::HorizonExceeded, "amplification beyond horizon");
  const std::size_t ks = dil.ps.fiber(s).module.ambient_dim();
  if (a.rows() != ks || a.cols() != ks)
    throw Error(ErrorKind::ShapeMismatch,
                "operator does not act on the source fiber");
  guard_ambient(dil.ps.fiber(s + t).module.ambient_dim(), kDenseGuard);
  return kron(a, CMatrix::identity(dil.ps.fiber(t).module.theta().mu()));
}

CMatrix j0(const DilationHorizon& dil, const CMatrix& b, std::size_t s) {
  if (s > dil.horizon)
    throw Error(ErrorKind::HorizonExceeded, "level beyond horizon");
  const CMatrix& xi = dil.ps.fiber(s).xi;
  if (b.rows() != xi.cols() || b.cols() != xi.cols())
    throw Error(ErrorKind::ShapeMismatch, "argument not in the base algebra");
  return xi * b * xi.adjoint();
}

double markov_check(const DilationHorizon& dil, const CMatrix& x,
                    std::size_t s, std::size_t t) {
  if (s + t > dil.horizon)
    throw Error(ErrorKind::HorizonExceeded, "horizon pair out of range");
  const std::size_t m = dil.qds.step.in_dim();
  if (x.rows() != m || x.cols() != m)
    throw Error(ErrorKind::ShapeMismatch, "argument not in the base algebra");
  const CMatrix unit = j0(dil, CMatrix::identity(m), s + t);
  const CMatrix lhs = unit * theta(dil, j0(dil, x, s), s, t) * unit;
  CMatrix xt = x;
  for (std::size_t k = 0; k < t; ++k) xt = dil.qds.step.apply(xt);
  const CMatrix rhs = j0(dil, xt, s + t);
  return max_abs_diff(lhs, rhs) / std::max(1.0, x.max_abs());
}

ProjectionChain increasing_projections(const DilationHorizon& dil,
                                       const CMatrix& q) {
  ProjectionChain chain;
  chain.ops.reserve(dil.horizon + 1);
  for (std::size_t s = 0; s <= dil.horizon; ++s) {
    CMatrix op = theta(dil, j0(dil, q, s), s, dil.horizon - s);
    chain.projection_residual =
        std::max(chain.projection_residual, max_abs_diff(op * op, op));
    chain.ops.push_back(std::move(op));
  }
  for (std::size_t s = dil.horizon; s >= 1; --s) {
    const CMatrix diff = chain.ops[s - 1] - chain.ops[s];
    const PsdReport rep = psd_check(diff, 1e-6);
    chain.ordering_margin = s == dil.horizon
                                ? rep.min_eigenvalue
                                : std::min(chain.ordering_margin,
                                           rep.min_eigenvalue);
  }
  chain.terminal_gap = max_abs_diff(chain.ops[0], left_proj(dil, q, dil.horizon));
  return chain;
}

StabilizationReport stabilization_check(const DilationHorizon& dil,
                                        const CMatrix& q, std::size_t t,
                                        const CMatrix& x) {
  if (t > dil.horizon)
    throw Error(ErrorKind::HorizonExceeded, "level beyond horizon");
  if (!dil.ps.fiber(t).module.accepts(x))
    throw Error(ErrorKind::ShapeMismatch, "vector not in the stated fiber");
  StabilizationReport out;
  const BilinearMap k = embedding(dil, t, dil.horizon);
  const CMatrix xhat = k.apply(x);
  const CMatrix target = k.apply(left_proj(dil, q, t) * x);
  for (std::size_t s = 0; s + t <= dil.horizon; ++s) {
    const CMatrix v =
        theta(dil, j0(dil, q, s), s, dil.horizon - s) * xhat;
    out.stabilization_residual =
        std::max(out.stabilization_residual, max_abs_diff(v, target));
  }
  for (std::size_t u = 0; u <= dil.horizon; ++u) {
    const CMatrix& xi = dil.ps.fiber(u).xi;
    const CMatrix lq = left_proj(dil, q, u) * xi;
    out.unit_commutation = std::max(
        {out.unit_commutation, max_abs_diff(lq, xi * q),
         max_abs_diff(lq * q, lq)});
  }
  out.stable =
      out.stabilization_residual <= 1e-9 * std::max(1.0, x.max_abs());
  return out;
}

BlockEndoReport block_endomorphism_check(const DilationHorizon& dil,
                                         std::size_t samples,
                                         std::uint64_t seed) {
  BlockEndoReport out;
  Rng rng(seed);
  const CMatrix* qs[2] = {&dil.p, &dil.p_perp};
  const std::size_t m = dil.qds.step.in_dim();

  for (std::size_t s = 0; s + 1 <= dil.horizon; ++s) {
    for (std::size_t t = 1; s + t <= dil.horizon; ++t) {
      const std::size_t ks = dil.ps.fiber(s).module.ambient_dim();
      for (std::size_t trial = 0; trial < samples; ++trial) {
        const CMatrix a = random_matrix(rng, ks, ks);
        const double scale = std::max(1.0, a.max_abs());
        for (std::size_t i = 0; i < 2; ++i) {
          for (std::size_t j = 0; j < 2; ++j) {
            const CMatrix corner = left_proj(dil, *qs[i], s) * a *
                                   left_proj(dil, *qs[j], s);
            const CMatrix image = theta(dil, corner, s, t);
            const CMatrix kept = left_proj(dil, *qs[i], s + t) * image *
                                 left_proj(dil, *qs[j], s + t);
            out.corner_leakage =
                std::max(out.corner_leakage,
                         max_abs_diff(image, kept) / scale);
          }
        }
      }
    }
  }

  for (std::size_t s = 0; s <= dil.horizon; ++s) {
    for (std::size_t h = s; h <= dil.horizon; ++h) {
      for (std::size_t t = 1; h + t <= dil.horizon; ++t) {
        const TensorProduct big =
            tensor(dil.ps.fiber(h).module, dil.ps.fiber(t).module);
        const TensorProduct small =
            tensor(dil.ps.fiber(s).module, dil.ps.fiber(t).module);
        for (std::size_t trial = 0; trial < samples; ++trial) {
          const CMatrix x = random_matrix(
              rng, dil.ps.fiber(s).module.ambient_dim(), m);
          const CMatrix y = random_matrix(
              rng, dil.ps.fiber(t).module.ambient_dim(), m);
          const double scale =
              std::max(1.0, x.max_abs() * y.max_abs());
          for (std::size_t i = 0; i < 2; ++i) {
            const CMatrix amp = j0(dil, *qs[i], h - s);
            const CMatrix w1 =
                theta(dil, amp, h - s, s) * embedding(dil, s, h).apply(x);
            const CMatrix lhs = big.factor(w1, y);
            const CMatrix rhs =
                theta(dil, amp, h - s, s + t) *
                embedding(dil, s + t, h + t).apply(small.factor(x, y));
            out.u_residual = std::max(
                out.u_residual, max_abs_diff(lhs, rhs) / scale);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace bqds
