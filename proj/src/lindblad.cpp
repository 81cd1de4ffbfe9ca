#include "bqds/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "bqds/numerics.hpp"

namespace bqds {

namespace {

void check_square(const CMatrix& m, std::size_t d, const char* what) {
  if (m.rows() != d || m.cols() != d)
    throw Error(ErrorKind::ShapeMismatch, what);
}

CMatrix embed_diag(const CMatrix& a, const CMatrix& b) {
  CMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), a.cols(), b);
  return m;
}

// Superoperator of a linear action on M_n, row-major vec convention:
// column r*n+c holds vec(f(E_rc)).
CMatrix superop_of_action(std::size_t n,
                          const std::function<CMatrix(const CMatrix&)>& f) {
  CMatrix m(n * n, n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const CMatrix im = f(matrix_unit(n, r, c));
      const std::size_t col = r * n + c;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i * n + j, col) = im(i, j);
    }
  }
  return m;
}

double map_scale(const MatrixUnitMap& f) {
  double s = 1.0;
  for (const CMatrix& im : f.images) s = std::max(s, im.max_abs());
  return s;
}

}  // namespace

BlockGenerator build_generator(const CMatrix& beta1, const CMatrix& beta2,
                               const std::vector<ZetaBlock>& zetas) {
  const std::size_t d = beta1.rows();
  check_square(beta1, d, "beta1 must be square");
  check_square(beta2, d, "beta2 must match beta1's shape");
  for (const ZetaBlock& z : zetas) {
    check_square(z.z1, d, "coupling block z1 must be d x d");
    check_square(z.z2, d, "coupling block z2 must be d x d");
  }
  BlockGenerator gen;
  gen.d = d;
  gen.beta1 = beta1;
  gen.beta2 = beta2;
  gen.zetas = zetas;
  gen.superop = superop_of_action(
      2 * d, [&](const CMatrix& a) { return generator_apply(gen, a); });
  return gen;
}

CMatrix generator_apply(const BlockGenerator& gen, const CMatrix& a) {
  check_square(a, 2 * gen.d, "argument must act on the doubled algebra");
  const CMatrix b = beta_full(gen);
  CMatrix out = a * b + b.adjoint() * a;
  for (std::size_t i = 0; i < gen.zetas.size(); ++i) {
    const CMatrix z = zeta_full(gen, i);
    out += z.adjoint() * a * z;
  }
  return out;
}

CMatrix beta_full(const BlockGenerator& gen) {
  return embed_diag(gen.beta1, gen.beta2);
}

CMatrix zeta_full(const BlockGenerator& gen, std::size_t i) {
  return embed_diag(gen.zetas[i].z1, gen.zetas[i].z2);
}

std::pair<CMatrix, CMatrix> markov_betas(
    const CMatrix& h1, const CMatrix& h2,
    const std::vector<ZetaBlock>& zetas) {
  const std::size_t d = h1.rows();
  check_square(h1, d, "h1 must be square");
  check_square(h2, d, "h2 must match h1's shape");
  CMatrix s1(d, d);
  CMatrix s2(d, d);
  for (const ZetaBlock& z : zetas) {
    check_square(z.z1, d, "coupling block z1 must be d x d");
    check_square(z.z2, d, "coupling block z2 must be d x d");
    s1 += z.z1.adjoint() * z.z1;
    s2 += z.z2.adjoint() * z.z2;
  }
  return {cplx{0.0, 1.0} * h1 - cplx{0.5, 0.0} * s1,
          cplx{0.0, 1.0} * h2 - cplx{0.5, 0.0} * s2};
}

MatrixUnitMap exp_superop(const CMatrix& m, std::size_t n, double t) {
  if (m.rows() != n * n || m.cols() != n * n)
    throw Error(ErrorKind::ShapeMismatch,
                "superoperator size does not match the algebra");
  const CMatrix e = expm(cplx{t, 0.0} * m);
  MatrixUnitMap out;
  out.n = n;
  out.d = n;
  out.images.reserve(n * n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      CMatrix v(n * n, 1);
      v(p * n + q, 0) = 1.0;
      const CMatrix w = e * v;
      CMatrix im(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) im(i, j) = w(i * n + j, 0);
      out.images.push_back(std::move(im));
    }
  }
  return out;
}

CpMap semigroup_at(const BlockGenerator& gen, double t, double tol) {
  if (t < 0.0)
    throw Error(ErrorKind::InvalidConfig, "time must be nonnegative");
  const MatrixUnitMap f = exp_superop(gen.superop, 2 * gen.d, t);
  return CpMap::from_choi(2 * gen.d, 2 * gen.d, f.choi(), tol);
}

GeneratorCorners generator_corners(const BlockGenerator& gen,
                                   const Tolerances& tol) {
  const std::size_t d = gen.d;
  auto corner = [&](std::size_t bi, std::size_t bj) {
    return MatrixUnitMap::from_function(d, d, [&](const CMatrix& a) {
      CMatrix big(2 * d, 2 * d);
      big.set_block(bi * d, bj * d, a);
      return generator_apply(gen, big).block(bi * d, bj * d, d, d);
    });
  };
  GeneratorCorners out;
  out.l11 = corner(0, 0);
  out.l12 = corner(0, 1);
  out.l21 = corner(1, 0);
  out.l22 = corner(1, 1);
  out.adjoint_residual =
      map_distance(out.l21, adjoint_map(out.l12)) / map_scale(out.l12);

  GnsModule gns1;
  GnsModule gns2;
  if (!gen.zetas.empty()) {
    std::vector<CMatrix> kraus;
    kraus.reserve(gen.zetas.size());
    for (std::size_t i = 0; i < gen.zetas.size(); ++i)
      kraus.push_back(zeta_full(gen, i));
    const CpMap tau = CpMap::from_kraus(2 * d, 2 * d, kraus, tol.build);
    const BlockCpMap b = verify_block(tau, tol.build);
    out.t = extract_contraction_module(b, tol);
    gns1 = gns_module(b.phi1);
    gns2 = gns_module(b.phi2);
  }

  for (std::size_t x = 0; x < d; ++x) {
    for (std::size_t y = 0; y < d; ++y) {
      const CMatrix a = matrix_unit(d, x, y);
      CMatrix want = a * gen.beta2 + gen.beta1.adjoint() * a;
      if (out.t)
        want += gns1.xi.adjoint() *
                (out.t->t.mat * gns2.module.left_act(a, gns2.xi));
      out.identity_residual =
          std::max(out.identity_residual,
                   max_abs_diff(out.l12.images[x * d + y], want));
    }
  }
  out.identity_residual /= map_scale(out.l12);
  return out;
}

CMatrix corner_superop(const BlockGenerator& gen) {
  return superop_of_action(gen.d, [&](const CMatrix& a) {
    CMatrix out = a * gen.beta2 + gen.beta1.adjoint() * a;
    for (const ZetaBlock& z : gen.zetas) out += z.z1.adjoint() * a * z.z2;
    return out;
  });
}

UnitDerivativeReport unit_derivative_check(const BlockGenerator& gen,
                                           const Tolerances& tol) {
  const std::size_t d = gen.d;
  const GeneratorCorners gc = generator_corners(gen, tol);
  UnitDerivativeReport out;

  GnsModule gns1;
  CMatrix eta;
  if (gc.t) {
    std::vector<CMatrix> kraus;
    for (std::size_t i = 0; i < gen.zetas.size(); ++i)
      kraus.push_back(zeta_full(gen, i));
    const CpMap tau = CpMap::from_kraus(2 * d, 2 * d, kraus, tol.build);
    const BlockCpMap b = verify_block(tau, tol.build);
    gns1 = gns_module(b.phi1);
    eta = gc.t->t.mat * gns_module(b.phi2).xi;
  }
  for (std::size_t x = 0; x < d; ++x) {
    for (std::size_t y = 0; y < d; ++y) {
      const CMatrix a = matrix_unit(d, x, y);
      CMatrix want = a * gen.beta2 + gen.beta1.adjoint() * a;
      if (gc.t)
        want += gns1.xi.adjoint() * gns1.module.left_act(a, eta);
      out.identity_residual =
          std::max(out.identity_residual,
                   max_abs_diff(gc.l12.images[x * d + y], want));
    }
  }
  out.identity_residual /= map_scale(gc.l12);

  const double t0 = 1e-4;
  const MatrixUnitMap stepped = exp_superop(corner_superop(gen), d, t0);
  for (std::size_t x = 0; x < d; ++x) {
    for (std::size_t y = 0; y < d; ++y) {
      const CMatrix a = matrix_unit(d, x, y);
      const CMatrix fd =
          cplx{1.0 / t0, 0.0} * (stepped.images[x * d + y] - a);
      out.finite_difference_error =
          std::max(out.finite_difference_error,
                   max_abs_diff(fd, gc.l12.images[x * d + y]));
    }
  }
  out.finite_difference_error /= map_scale(gc.l12);
  return out;
}

CMatrix perturbed_superop(const BlockGenerator& gen, double c) {
  const std::size_t d = gen.d;
  const CMatrix b = beta_full(gen);
  return superop_of_action(2 * d, [&](const CMatrix& a) {
    CMatrix zterm(2 * d, 2 * d);
    for (std::size_t i = 0; i < gen.zetas.size(); ++i) {
      const CMatrix z = zeta_full(gen, i);
      zterm += z.adjoint() * a * z;
    }
    // Scale only the coupling's off-diagonal corners; the beta terms stay.
    CMatrix scaled = zterm;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        scaled(i, d + j) *= c;
        scaled(d + i, j) *= c;
      }
    }
    return a * b + b.adjoint() * a + scaled;
  });
}

}  // namespace bqds
