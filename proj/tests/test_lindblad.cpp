#include "bqds/errors.hpp"
#include "bqds/lindblad.hpp"
#include "bqds/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

using bqds::CMatrix;
using bqds::CpMap;
using bqds::Rng;
using cplx = std::complex<double>;

namespace {

bqds::BlockGenerator random_markov_generator(Rng& rng, std::size_t d,
                                             std::size_t couplings) {
  std::vector<bqds::ZetaBlock> zetas;
  for (std::size_t i = 0; i < couplings; ++i)
    zetas.push_back({bqds::random_matrix(rng, d, d, 0.6),
                     bqds::random_matrix(rng, d, d, 0.6)});
  auto betas = bqds::markov_betas(bqds::random_hermitian(rng, d),
                                  bqds::random_hermitian(rng, d), zetas);
  return bqds::build_generator(betas.first, betas.second, zetas);
}

// Generator with identical blocks on both corners; its coupling contraction
// is the identity, sitting exactly on the norm boundary.
bqds::BlockGenerator symmetric_generator(std::size_t d) {
  CMatrix z(d, d);
  z(0, 0) = 0.4;
  z(0, 1 % d) = 0.3;
  z(1 % d, 1 % d) = 0.2;
  CMatrix h(d, d);
  h(0, 0) = 0.5;
  h(0, 1 % d) = cplx(0.1, 0.2);
  h(1 % d, 0) = cplx(0.1, -0.2);
  std::vector<bqds::ZetaBlock> zetas{{z, z}};
  auto betas = bqds::markov_betas(h, h, zetas);
  return bqds::build_generator(betas.first, betas.second, zetas);
}

// (i, j) corner of a map on M_{2d} evaluated at a in M_d.
CMatrix corner_apply(const CpMap& full, std::size_t i, std::size_t j,
                     std::size_t d, const CMatrix& a) {
  CMatrix big(2 * d, 2 * d);
  big.set_block(i * d, j * d, a);
  return full.apply(big).block(i * d, j * d, d, d);
}

// Superoperator matrix of a map on matrix units, row-major vec convention.
CMatrix superop_of(const bqds::MatrixUnitMap& f) {
  CMatrix s(f.d * f.d, f.n * f.n);
  for (std::size_t r = 0; r < f.n; ++r)
    for (std::size_t c = 0; c < f.n; ++c) {
      const CMatrix& img = f.images[r * f.n + c];
      for (std::size_t i = 0; i < f.d; ++i)
        for (std::size_t j = 0; j < f.d; ++j)
          s(i * f.d + j, r * f.n + c) = img(i, j);
    }
  return s;
}

}  // namespace

TEST_CASE("the zero generator exponentiates to the identity semigroup") {
  bqds::BlockGenerator zero =
      bqds::build_generator(CMatrix(2, 2), CMatrix(2, 2), {});
  CHECK(zero.superop.max_abs() < 1e-15);
  Rng rng(901);
  CMatrix a = bqds::random_matrix(rng, 4, 4);
  CHECK(bqds::generator_apply(zero, a).max_abs() < 1e-15);
  CpMap phi = bqds::semigroup_at(zero, 1.7);
  CHECK(bqds::max_abs_diff(phi.apply(a), a) < 1e-12);
}

TEST_CASE("markov_betas balance the coupling to a conservative generator") {
  Rng rng(902);
  bqds::BlockGenerator gen = random_markov_generator(rng, 2, 2);
  CHECK(bqds::generator_apply(gen, CMatrix::identity(4)).max_abs() < 1e-14);
  // e^{tL} is then unital at every t.
  CpMap phi = bqds::semigroup_at(gen, 0.7);
  CHECK(phi.is_unital(1e-9));
}

TEST_CASE("generator preserves hermiticity and matches its superoperator") {
  Rng rng(903);
  bqds::BlockGenerator gen = random_markov_generator(rng, 2, 2);
  for (int trial = 0; trial < 5; ++trial) {
    CMatrix a = bqds::random_matrix(rng, 4, 4);
    CMatrix la = bqds::generator_apply(gen, a);
    CHECK(bqds::max_abs_diff(bqds::generator_apply(gen, a.adjoint()),
                             la.adjoint()) < 1e-12);
    CHECK(bqds::max_abs_diff(gen.superop * bqds::vec(a), bqds::vec(la)) < 1e-12);
  }
}

TEST_CASE("semigroup_at satisfies the semigroup law and the ODE") {
  Rng rng(904);
  bqds::BlockGenerator gen = random_markov_generator(rng, 2, 1);

  CpMap at0 = bqds::semigroup_at(gen, 0.0);
  CMatrix a = bqds::random_matrix(rng, 4, 4);
  CHECK(bqds::max_abs_diff(at0.apply(a), a) < 1e-12);

  CpMap half = bqds::semigroup_at(gen, 0.35);
  CpMap full = bqds::semigroup_at(gen, 0.7);
  CpMap composed = bqds::compose(half, half);
  CHECK(bqds::map_distance(composed.as_unit_map(), full.as_unit_map()) < 1e-9);

  // Independent integration of the superoperator ODE.
  CMatrix prop = oracles::expm_ode(gen.superop, 0.7);
  CHECK(bqds::max_abs_diff(prop * bqds::vec(a), bqds::vec(full.apply(a))) < 1e-8);
}

TEST_CASE("exp_superop matches the dense exponential on matrix units") {
  Rng rng(905);
  CMatrix m = bqds::random_matrix(rng, 9, 9, 0.5);
  bqds::MatrixUnitMap f = bqds::exp_superop(m, 3, 0.8);
  CMatrix em = bqds::expm(0.8 * m);
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t q = 0; q < 3; ++q) {
      CMatrix unit(3, 3);
      unit(p, q) = 1.0;
      CMatrix want_vec = em * bqds::vec(unit);
      CHECK(bqds::max_abs_diff(bqds::vec(f.images[p * 3 + q]), want_vec) < 1e-11);
    }
}

TEST_CASE("generator corners recover the coupling contraction") {
  Rng rng(906);
  bqds::BlockGenerator gen = random_markov_generator(rng, 2, 2);
  bqds::GeneratorCorners corners = bqds::generator_corners(gen);

  CHECK(corners.identity_residual < 1e-8);
  CHECK(corners.adjoint_residual < 1e-10);
  REQUIRE(corners.t.has_value());
  CHECK(corners.t->operator_norm <= 1.0 + bqds::kContractionSlack);
  CHECK(corners.t->reconstruction_residual < 1e-8);

  // Corner maps agree with direct corner evaluation of L.
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t q = 0; q < 2; ++q) {
      CMatrix unit(2, 2);
      unit(p, q) = 1.0;
      CMatrix big11(4, 4);
      big11.set_block(0, 0, unit);
      CHECK(bqds::max_abs_diff(corners.l11.images[p * 2 + q],
                               bqds::generator_apply(gen, big11).block(0, 0, 2, 2)) <
            1e-12);
      CMatrix big12(4, 4);
      big12.set_block(0, 2, unit);
      CHECK(bqds::max_abs_diff(corners.l12.images[p * 2 + q],
                               bqds::generator_apply(gen, big12).block(0, 2, 2, 2)) <
            1e-12);
    }
  CHECK(bqds::map_distance(corners.l21, bqds::adjoint_map(corners.l12)) < 1e-12);
}

TEST_CASE("uncoupled generators have no contraction to extract") {
  bqds::BlockGenerator gen =
      bqds::build_generator(CMatrix(2, 2), CMatrix(2, 2), {});
  bqds::GeneratorCorners corners = bqds::generator_corners(gen);
  CHECK_FALSE(corners.t.has_value());
  CHECK(corners.identity_residual < 1e-12);
}

TEST_CASE("symmetric couplings sit exactly on the contraction boundary") {
  bqds::BlockGenerator gen = symmetric_generator(2);
  bqds::GeneratorCorners corners = bqds::generator_corners(gen);
  REQUIRE(corners.t.has_value());
  CHECK(corners.t->operator_norm == doctest::Approx(1.0).epsilon(1e-9));
  // Identical blocks make all four corners coincide.
  CHECK(bqds::map_distance(corners.l12, corners.l11) < 1e-12);
  CHECK(bqds::map_distance(corners.l22, corners.l11) < 1e-12);
}

TEST_CASE("diagonal corners of the flow exponentiate the diagonal corners") {
  Rng rng(907);
  bqds::BlockGenerator gen = random_markov_generator(rng, 2, 2);
  bqds::GeneratorCorners corners = bqds::generator_corners(gen);
  CMatrix s11 = superop_of(corners.l11);
  CMatrix s22 = superop_of(corners.l22);

  for (double t : {0.1, 0.5, 1.0}) {
    CpMap phi = bqds::semigroup_at(gen, t);
    bqds::MatrixUnitMap e11 = bqds::exp_superop(s11, 2, t);
    bqds::MatrixUnitMap e22 = bqds::exp_superop(s22, 2, t);
    for (std::size_t p = 0; p < 2; ++p)
      for (std::size_t q = 0; q < 2; ++q) {
        CMatrix unit(2, 2);
        unit(p, q) = 1.0;
        CHECK(bqds::max_abs_diff(corner_apply(phi, 0, 0, 2, unit),
                                 e11.images[p * 2 + q]) < 1e-8);
        CHECK(bqds::max_abs_diff(corner_apply(phi, 1, 1, 2, unit),
                                 e22.images[p * 2 + q]) < 1e-8);
      }
  }
}

TEST_CASE("the off-diagonal corner of the flow is the corner exponential") {
  Rng rng(908);
  bqds::BlockGenerator gen = random_markov_generator(rng, 2, 2);
  CMatrix s12 = bqds::corner_superop(gen);
  CHECK(bqds::max_abs_diff(s12, superop_of(bqds::generator_corners(gen).l12)) <
        1e-12);

  for (double t : {0.1, 0.5, 1.0}) {
    CpMap phi = bqds::semigroup_at(gen, t);
    bqds::MatrixUnitMap e12 = bqds::exp_superop(s12, 2, t);
    for (std::size_t p = 0; p < 2; ++p)
      for (std::size_t q = 0; q < 2; ++q) {
        CMatrix unit(2, 2);
        unit(p, q) = 1.0;
        CHECK(bqds::max_abs_diff(corner_apply(phi, 0, 1, 2, unit),
                                 e12.images[p * 2 + q]) < 1e-8);
      }
  }
}

TEST_CASE("unit derivative data matches the corner generator") {
  Rng rng(909);
  bqds::BlockGenerator gen = random_markov_generator(rng, 2, 2);
  bqds::UnitDerivativeReport rep = bqds::unit_derivative_check(gen);
  CHECK(rep.identity_residual < 1e-9);
  CHECK(rep.finite_difference_error < 1e-3);
}

TEST_CASE("perturbed_superop interpolates the coupling strength") {
  Rng rng(910);
  bqds::BlockGenerator gen = random_markov_generator(rng, 2, 2);
  CHECK(bqds::max_abs_diff(bqds::perturbed_superop(gen, 1.0), gen.superop) <
        1e-15);

  // c = 0 removes the coupling, so the off-diagonal corner evolves by the
  // damping terms alone: a -> e^{t beta1^*} a e^{t beta2} in closed form.
  CMatrix off = bqds::perturbed_superop(gen, 0.0);
  const double t = 0.5;
  bqds::MatrixUnitMap f = bqds::exp_superop(off, 4, t);
  CMatrix left = bqds::expm(t * gen.beta1.adjoint());
  CMatrix right = bqds::expm(t * gen.beta2);
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t q = 0; q < 2; ++q) {
      CMatrix unit(2, 2);
      unit(p, q) = 1.0;
      CMatrix big(4, 4);
      big.set_block(0, 2, unit);
      CMatrix img = f.apply(big);
      CHECK(bqds::max_abs_diff(img.block(0, 2, 2, 2), left * unit * right) < 1e-10);
      // Strictly upper inputs stay strictly upper under the flow.
      CHECK(img.block(0, 0, 2, 2).max_abs() < 1e-12);
      CHECK(img.block(2, 2, 2, 2).max_abs() < 1e-12);
    }
}

TEST_CASE("overdriven coupling breaks complete positivity at small times") {
  bqds::BlockGenerator gen = symmetric_generator(2);

  // Within the boundary the flow stays CP at every sampled time.
  for (double t : {0.05, 0.1, 0.5, 1.0}) {
    CMatrix mild = bqds::perturbed_superop(gen, 0.8);
    bqds::PsdReport rep = bqds::psd_check(bqds::exp_superop(mild, 4, t).choi(), 1e-9);
    CHECK(rep.min_eigenvalue > -1e-10);
    CMatrix exact = bqds::perturbed_superop(gen, 1.0);
    CHECK(bqds::psd_check(bqds::exp_superop(exact, 4, t).choi(), 1e-9)
              .min_eigenvalue > -1e-10);
  }

  // Beyond it the Choi matrix dips negative, certified by an independent
  // bottom-eigenvalue witness.
  CMatrix hot = bqds::perturbed_superop(gen, 1.25);
  for (double t : {0.05, 0.1}) {
    CMatrix choi = bqds::exp_superop(hot, 4, t).choi();
    bqds::PsdReport rep = bqds::psd_check(choi, 1e-9);
    CHECK(rep.min_eigenvalue < -1e-9);
    oracles::BottomEig bot = oracles::bottom_eig(choi);
    CHECK(bot.value < -1e-9);
  }
}
