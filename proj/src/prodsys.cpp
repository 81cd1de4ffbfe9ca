#include "bqds/prodsys.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "bqds/numerics.hpp"

namespace bqds {

namespace {

void check_partition(const Partition& p) {
  if (p.parts.empty())
    throw Error(ErrorKind::InvalidConfig, "composition must be nonempty");
  for (std::size_t part : p.parts)
    if (part == 0)
      throw Error(ErrorKind::InvalidConfig, "composition parts must be >= 1");
}

// beta_{p(t)} : E_t -> E_p for a composition p of t, assembled by peeling
// the rightmost part first and splitting the left remainder further.
CMatrix single_split_mat(const InclusionSystem& sys, const Partition& p) {
  const std::size_t t = p.total();
  if (p.parts.size() == 1)
    return CMatrix::identity(sys.at(t).module.ambient_dim());
  CMatrix acc;
  std::size_t remaining = t;
  std::size_t done_mu = 1;
  for (std::size_t k = p.parts.size(); k-- > 1;) {
    const std::size_t part = p.parts[k];
    const CMatrix& b = sys.beta(remaining - part, part).mat;
    acc = acc.rows() == 0 ? b : kron(b, CMatrix::identity(done_mu)) * acc;
    done_mu *= sys.at(part).module.theta().mu();
    remaining -= part;
  }
  return acc;
}

double vec_norm(const CMatrix& v) { return v.frobenius_norm(); }

}  // namespace

std::size_t Partition::total() const {
  std::size_t sum = 0;
  for (std::size_t part : parts) sum += part;
  return sum;
}

bool operator==(const Partition& a, const Partition& b) {
  return a.parts == b.parts;
}

std::vector<Partition> partitions(std::size_t t) {
  if (t == 0)
    throw Error(ErrorKind::InvalidConfig, "compositions need a total >= 1");
  std::vector<Partition> out;
  // Bit i of the mask set = a break after position i + 1.
  const std::size_t count = std::size_t{1} << (t - 1);
  out.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Partition p;
    std::size_t part = 1;
    for (std::size_t pos = 0; pos + 1 < t; ++pos) {
      if (mask & (std::size_t{1} << pos)) {
        p.parts.push_back(part);
        part = 1;
      } else {
        ++part;
      }
    }
    p.parts.push_back(part);
    out.push_back(std::move(p));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Partition& a, const Partition& b) {
                     if (a.parts.size() != b.parts.size())
                       return a.parts.size() > b.parts.size();
                     return a.parts < b.parts;
                   });
  return out;
}

bool refines(const Partition& fine, const Partition& coarse) {
  if (fine.total() != coarse.total()) return false;
  std::size_t idx = 0;
  for (std::size_t c : coarse.parts) {
    std::size_t acc = 0;
    while (acc < c) {
      if (idx >= fine.parts.size()) return false;
      acc += fine.parts[idx++];
    }
    if (acc != c) return false;
  }
  return idx == fine.parts.size();
}

Partition joint(const Partition& s, const Partition& t) {
  Partition out = s;
  out.parts.insert(out.parts.end(), t.parts.begin(), t.parts.end());
  return out;
}

Partition finest(std::size_t t) {
  Partition p;
  p.parts.assign(t, 1);
  return p;
}

VnBimodule partition_module(const InclusionSystem& sys, const Partition& p) {
  check_partition(p);
  if (p.total() > sys.horizon)
    throw Error(ErrorKind::HorizonExceeded, "composition total beyond horizon");
  VnBimodule cur = sys.at(p.parts[0]).module;
  for (std::size_t k = 1; k < p.parts.size(); ++k)
    cur = tensor(cur, sys.at(p.parts[k]).module).module;
  return cur;
}

CMatrix partition_unit(const InclusionSystem& sys, const Partition& p) {
  check_partition(p);
  if (p.total() > sys.horizon)
    throw Error(ErrorKind::HorizonExceeded, "composition total beyond horizon");
  VnBimodule cur = sys.at(p.parts[0]).module;
  CMatrix unit = sys.at(p.parts[0]).xi;
  for (std::size_t k = 1; k < p.parts.size(); ++k) {
    const TensorProduct tp = tensor(cur, sys.at(p.parts[k]).module);
    unit = tp.factor(unit, sys.at(p.parts[k]).xi);
    cur = tp.module;
  }
  return unit;
}

BilinearMap refinement_map(const InclusionSystem& sys, const Partition& fine,
                           const Partition& coarse) {
  check_partition(fine);
  check_partition(coarse);
  if (!refines(fine, coarse))
    throw Error(ErrorKind::NotRefinement,
                "first composition does not refine the second");
  CMatrix mat;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < coarse.parts.size(); ++i) {
    const std::size_t c = coarse.parts[i];
    Partition group;
    std::size_t acc = 0;
    while (acc < c) {
      group.parts.push_back(fine.parts[idx]);
      acc += fine.parts[idx++];
    }
    const CMatrix piece = single_split_mat(sys, group);
    if (i == 0) {
      mat = piece;
    } else {
      const MuDescent desc =
          mu_descend(sys.at(c).module.theta(),
                     partition_module(sys, group).theta(), piece);
      mat = kron(mat, desc.s);
    }
  }
  return BilinearMap{partition_module(sys, coarse),
                     partition_module(sys, fine), std::move(mat)};
}

BilinearMap morphism_on_partition(const Morphism& t, const Partition& p) {
  check_partition(p);
  for (std::size_t part : p.parts)
    if (part >= t.maps.size())
      throw Error(ErrorKind::HorizonExceeded,
                  "composition part beyond the morphism horizon");
  const BilinearMap& first = t.maps[p.parts[0]];
  CMatrix mat = first.mat;
  VnBimodule src = first.source;
  VnBimodule dst = first.target;
  for (std::size_t k = 1; k < p.parts.size(); ++k) {
    const BilinearMap& f = t.maps[p.parts[k]];
    const MuDescent desc =
        mu_descend(f.source.theta(), f.target.theta(), f.mat);
    mat = kron(mat, desc.s);
    src = tensor(src, f.source).module;
    dst = tensor(dst, f.target).module;
  }
  return BilinearMap{std::move(src), std::move(dst), std::move(mat)};
}

const GnsModule& ProductSystem::fiber(std::size_t t) const {
  if (t >= fibers.size())
    throw Error(ErrorKind::HorizonExceeded, "fiber index beyond horizon");
  return fibers[t];
}

const BilinearMap& ProductSystem::inclusion(const Partition& p) const {
  const std::size_t t = p.total();
  if (t == 0 || t > horizon)
    throw Error(ErrorKind::HorizonExceeded,
                "composition total beyond horizon");
  for (std::size_t k = 0; k < index[t].size(); ++k)
    if (index[t][k] == p) return incl[t][k];
  throw Error(ErrorKind::InvalidConfig, "composition not in the index");
}

BilinearMap ProductSystem::product(std::size_t s, std::size_t t) const {
  if (s + t > horizon)
    throw Error(ErrorKind::HorizonExceeded, "product index beyond horizon");
  const TensorProduct tp = tensor(fiber(s).module, fiber(t).module);
  return BilinearMap{tp.module, fiber(s + t).module,
                     CMatrix::identity(fiber(s + t).module.ambient_dim())};
}

ProductSystem generate(const InclusionSystem& sys) {
  ProductSystem ps;
  ps.horizon = sys.horizon;
  ps.fibers.push_back(sys.at(0));
  ps.index.resize(sys.horizon + 1);
  ps.incl.resize(sys.horizon + 1);
  for (std::size_t t = 1; t <= sys.horizon; ++t) {
    const Partition fin = finest(t);
    ps.fibers.push_back(
        GnsModule{partition_module(sys, fin), partition_unit(sys, fin)});
    for (const Partition& p : partitions(t)) {
      ps.index[t].push_back(p);
      ps.incl[t].push_back(refinement_map(sys, fin, p));
    }
  }
  return ps;
}

ProductChecks verify_product_system(const ProductSystem& ps,
                                    const InclusionSystem& sys) {
  ProductChecks out;
  for (std::size_t t = 1; t <= ps.horizon; ++t) {
    for (std::size_t k = 0; k < ps.index[t].size(); ++k) {
      const Partition& p = ps.index[t][k];
      const BilinearMap& ip = ps.incl[t][k];
      out.inclusion_isometry =
          std::max(out.inclusion_isometry, isometry_residual(ip.mat));
      out.inclusion_bilinearity =
          std::max(out.inclusion_bilinearity,
                   bilinearity_residual(ip.source, ip.target, ip.mat));
      for (std::size_t l = 0; l < ps.index[t].size(); ++l) {
        const Partition& u = ps.index[t][l];
        if (l == k || !refines(u, p)) continue;
        const BilinearMap step = refinement_map(sys, u, p);
        out.compatibility = std::max(
            out.compatibility,
            max_abs_diff(ip.mat, ps.incl[t][l].mat * step.mat));
      }
    }
    const BilinearMap& single = ps.inclusion(Partition{{t}});
    out.unit_coherence =
        std::max(out.unit_coherence,
                 max_abs_diff(single.apply(sys.at(t).xi), ps.fiber(t).xi));
  }
  for (std::size_t s = 1; s < ps.horizon; ++s) {
    for (std::size_t t = 1; s + t <= ps.horizon; ++t) {
      for (const Partition& a : ps.index[s]) {
        for (const Partition& b : ps.index[t]) {
          const BilinearMap& ia = ps.inclusion(a);
          const BilinearMap& ib = ps.inclusion(b);
          const TensorMap tm =
              tensor_map(ia.mat, ib.source, ib.target, ib.mat);
          out.product_compat =
              std::max(out.product_compat,
                       max_abs_diff(ps.product(s, t).mat * tm.mat,
                                    ps.inclusion(joint(a, b)).mat));
        }
      }
    }
  }
  for (std::size_t r = 1; r <= ps.horizon; ++r) {
    for (std::size_t s = 1; r + s <= ps.horizon; ++s) {
      for (std::size_t t = 1; r + s + t <= ps.horizon; ++t) {
        const TensorMap left = tensor_map(
            ps.product(r, s).mat, ps.fiber(t).module, ps.fiber(t).module,
            CMatrix::identity(ps.fiber(t).module.ambient_dim()));
        const BilinearMap bst = ps.product(s, t);
        const TensorMap right = tensor_map(
            CMatrix::identity(ps.fiber(r).module.ambient_dim()), bst.source,
            bst.target, bst.mat);
        out.associativity =
            std::max(out.associativity,
                     max_abs_diff(ps.product(r + s, t).mat * left.mat,
                                  ps.product(r, s + t).mat * right.mat));
      }
    }
  }
  return out;
}

CMatrix partition_projection(const ProductSystem& ps, const Partition& p) {
  const CMatrix& mat = ps.inclusion(p).mat;
  return mat * mat.adjoint();
}

BilinearMap net_map(const ProductSystem& ps1, const ProductSystem& ps2,
                    const Morphism& t, const Partition& p) {
  const BilinearMap tp = morphism_on_partition(t, p);
  const BilinearMap& i = ps2.inclusion(p);
  const BilinearMap& j = ps1.inclusion(p);
  if (!i.source.same_as(tp.source) || !j.source.same_as(tp.target))
    throw Error(ErrorKind::DimMismatch,
                "morphism fibers do not match the product systems");
  const std::size_t s = p.total();
  return BilinearMap{ps2.fiber(s).module, ps1.fiber(s).module,
                     j.mat * (tp.mat * i.mat.adjoint())};
}

LiftReport lift_morphism(const Morphism& t, const ProductSystem& ps1,
                         const ProductSystem& ps2, const Tolerances& tol) {
  if (ps1.horizon != ps2.horizon || t.horizon != ps1.horizon ||
      t.maps.size() != t.horizon + 1)
    throw Error(ErrorKind::DimMismatch,
                "morphism horizon does not match the product systems");
  const BilinearMap& t1 = t.maps[1];
  if (!ps2.fiber(1).module.same_as(t1.source) ||
      !ps1.fiber(1).module.same_as(t1.target))
    throw Error(ErrorKind::DimMismatch,
                "morphism seed does not act between the t = 1 fibers");

  LiftReport rep;
  rep.lift.horizon = t.horizon;
  rep.lift.growth = t.growth;
  rep.lift.maps.push_back(
      BilinearMap{ps2.fiber(0).module, ps1.fiber(0).module,
                  CMatrix::identity(ps2.fiber(0).module.ambient_dim())});
  const MuDescent d1 = mu_descend(t1.source.theta(), t1.target.theta(),
                                  t1.mat);
  CMatrix cur = t1.mat;
  rep.lift.maps.push_back(
      BilinearMap{ps2.fiber(1).module, ps1.fiber(1).module, cur});
  for (std::size_t k = 2; k <= t.horizon; ++k) {
    cur = kron(cur, d1.s);
    rep.lift.maps.push_back(
        BilinearMap{ps2.fiber(k).module, ps1.fiber(k).module, cur});
  }

  for (std::size_t s = 1; s <= t.horizon; ++s) {
    for (const Partition& p : ps2.index[s]) {
      const BilinearMap tp = morphism_on_partition(t, p);
      const CMatrix rec = ps1.inclusion(p).mat.adjoint() *
                          (rep.lift.maps[s].mat * ps2.inclusion(p).mat);
      rep.compression_residual =
          std::max(rep.compression_residual, max_abs_diff(tp.mat, rec));
    }
  }
  for (std::size_t s = 1; s < t.horizon; ++s) {
    for (std::size_t u = 1; s + u <= t.horizon; ++u) {
      const TensorMap tm =
          tensor_map(rep.lift.maps[s].mat, ps2.fiber(u).module,
                     ps1.fiber(u).module, rep.lift.maps[u].mat);
      const CMatrix rec = ps1.product(s, u).mat *
                          (tm.mat * ps2.product(s, u).mat.adjoint());
      rep.multiplicativity_residual =
          std::max(rep.multiplicativity_residual,
                   max_abs_diff(rep.lift.maps[s + u].mat, rec));
    }
  }
  const double n1 = operator_norm(t1.mat);
  for (std::size_t k = 1; k <= t.horizon; ++k)
    rep.norm_excess =
        std::max(rep.norm_excess,
                 operator_norm(rep.lift.maps[k].mat) -
                     std::pow(n1, static_cast<double>(k)));
  if (rep.compression_residual > tol.verify ||
      rep.multiplicativity_residual > tol.verify)
    throw Error(ErrorKind::NotMorphism,
                "the morphism does not lift consistently",
                std::max(rep.compression_residual,
                         rep.multiplicativity_residual));
  return rep;
}

NetCheck monotone_net_check(const ProductSystem& ps1,
                            const ProductSystem& ps2, const Morphism& t,
                            std::size_t s, const CMatrix& x,
                            const CMatrix& g) {
  if (s == 0 || s > ps2.horizon)
    throw Error(ErrorKind::HorizonExceeded, "span outside the horizon");
  if (!ps2.fiber(s).module.accepts(x))
    throw Error(ErrorKind::ShapeMismatch, "vector not in the source fiber");
  if (g.rows() != ps2.fiber(s).module.right_dim() || g.cols() != 1)
    throw Error(ErrorKind::ShapeMismatch,
                "test vector must be a column over the right algebra");

  // r_j = (1, ..., 1, s - j) with j ones; r_0 = (s), r_{s-1} = finest.
  std::vector<Partition> chain;
  for (std::size_t j = 0; j < s; ++j) {
    Partition r;
    r.parts.assign(j, 1);
    r.parts.push_back(s - j);
    chain.push_back(std::move(r));
  }
  const CMatrix xp = partition_projection(ps2, chain[0]) * x;

  NetCheck out;
  for (const Partition& r : chain)
    out.norms.push_back(vec_norm(net_map(ps1, ps2, t, r).apply(xp) * g));

  // Terminal comparison against the lifted map on the maximal fiber.
  const BilinearMap& t1 = t.maps[1];
  const MuDescent d1 =
      mu_descend(t1.source.theta(), t1.target.theta(), t1.mat);
  CMatrix that = t1.mat;
  for (std::size_t k = 2; k <= s; ++k) that = kron(that, d1.s);
  out.terminal_gap =
      std::abs(out.norms.back() - vec_norm(that * xp * g));
  for (std::size_t k = 0; k + 1 < out.norms.size(); ++k)
    out.monotonicity_margin = std::min(
        out.monotonicity_margin, out.norms[k + 1] - out.norms[k]);
  return out;
}

}  // namespace bqds
