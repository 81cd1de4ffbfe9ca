#include "bqds/dilation.hpp"
#include "bqds/errors.hpp"
#include "bqds/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

using bqds::CMatrix;
using bqds::CpMap;
using bqds::Rng;
using cplx = std::complex<double>;

namespace {

CMatrix block_projection(std::size_t d) {
  CMatrix p(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) p(i, i) = 1.0;
  return p;
}

// Unital block step on M_{2d} with a planted contraction.
CpMap planted_step(Rng& rng, std::size_t d, double norm) {
  CpMap phi1 = bqds::random_cp(rng, d, d, 2, true);
  CpMap phi2 = bqds::random_cp(rng, d, d, 2, true);
  bqds::GnsModule g1 = bqds::gns_module(phi1);
  bqds::GnsModule g2 = bqds::gns_module(phi2);
  CMatrix s = bqds::random_contraction(rng, g1.module.theta().mu(),
                                       g2.module.theta().mu(), norm);
  bqds::BilinearMap t{g2.module, g1.module, bqds::kron(CMatrix::identity(d), s)};
  return bqds::build_from_contraction(phi1, phi2, g1, g2, t).full;
}

}  // namespace

TEST_CASE("make_dilation validates unitality, projection shape and blockness") {
  Rng rng(801);
  CpMap step = planted_step(rng, 2, 0.8);
  CMatrix p = block_projection(2);
  bqds::DilationHorizon dil = bqds::make_dilation(step, 3, p);
  CHECK(dil.horizon == 3);
  CHECK(bqds::max_abs_diff(dil.p_perp, CMatrix::identity(4) - p) < 1e-14);

  // Non-unital step is refused.
  CpMap sub = bqds::random_cp(rng, 4, 4, 2, false);
  try {
    bqds::make_dilation(sub, 2, p);
    FAIL("expected NotUnital");
  } catch (const bqds::Error& e) {
    CHECK(e.kind() == bqds::ErrorKind::NotUnital);
  }

  // A non-projection or non-diagonal p is refused.
  CMatrix half = 0.5 * CMatrix::identity(4);
  CHECK_THROWS_AS(bqds::make_dilation(step, 2, half), bqds::Error);

  // A step that moves mass across p is refused.
  CMatrix u = bqds::random_unitary(rng, 4);
  CpMap mixing = CpMap::from_kraus(4, 4, {u});
  try {
    bqds::make_dilation(mixing, 2, p);
    FAIL("expected NotBlock");
  } catch (const bqds::Error& e) {
    CHECK(e.kind() == bqds::ErrorKind::NotBlock);
  }

  // Horizon zero is rejected.
  CHECK_THROWS_AS(bqds::make_dilation(step, 0, p), bqds::Error);
}

TEST_CASE("embeddings are isometric and compose across horizons") {
  Rng rng(802);
  CpMap step = planted_step(rng, 2, 0.75);
  bqds::DilationHorizon dil = bqds::make_dilation(step, 3, block_projection(2));

  for (std::size_t s = 0; s <= 3; ++s)
    for (std::size_t t = s; t <= 3; ++t) {
      bqds::BilinearMap k = bqds::embedding(dil, s, t);
      CHECK(bqds::isometry_residual(k.mat) < 1e-9);
      // Right-linear by construction: prepending the unit commutes with the
      // right action.
      CMatrix x = bqds::random_matrix(rng, dil.ps.fiber(s).module.ambient_dim(),
                                      dil.ps.fiber(s).module.right_dim());
      CMatrix b = bqds::random_matrix(rng, dil.ps.fiber(s).module.right_dim(),
                                      dil.ps.fiber(s).module.right_dim());
      CHECK(bqds::max_abs_diff(k.apply(x * b), k.apply(x) * b) < 1e-10);
    }

  bqds::BilinearMap k01 = bqds::embedding(dil, 0, 1);
  bqds::BilinearMap k13 = bqds::embedding(dil, 1, 3);
  bqds::BilinearMap k03 = bqds::embedding(dil, 0, 3);
  CHECK(bqds::max_abs_diff(k13.mat * k01.mat, k03.mat) < 1e-10);

  CHECK_THROWS_AS(bqds::embedding(dil, 2, 5), bqds::Error);
}

TEST_CASE("theta is a unital *-endomorphism semigroup") {
  Rng rng(803);
  CpMap step = planted_step(rng, 2, 0.8);
  bqds::DilationHorizon dil = bqds::make_dilation(step, 3, block_projection(2));
  const std::size_t dim1 = dil.ps.fiber(1).module.ambient_dim();

  CMatrix a = bqds::random_matrix(rng, dim1, dim1);
  CMatrix b = bqds::random_matrix(rng, dim1, dim1);

  // Multiplicative, *-preserving, unital.
  CHECK(bqds::max_abs_diff(bqds::theta(dil, a * b, 1, 2),
                           bqds::theta(dil, a, 1, 2) * bqds::theta(dil, b, 1, 2)) <
        1e-10);
  CHECK(bqds::max_abs_diff(bqds::theta(dil, a.adjoint(), 1, 2),
                           bqds::theta(dil, a, 1, 2).adjoint()) < 1e-12);
  CMatrix one = bqds::theta(dil, CMatrix::identity(dim1), 1, 2);
  CHECK(bqds::max_abs_diff(one, CMatrix::identity(one.rows())) < 1e-12);

  // Semigroup nesting: theta_{t'}(theta_t(a)) = theta_{t+t'}(a).
  CMatrix once = bqds::theta(dil, a, 1, 1);
  CMatrix twice = bqds::theta(dil, once, 2, 1);
  CHECK(bqds::max_abs_diff(twice, bqds::theta(dil, a, 1, 2)) < 1e-12);
}

TEST_CASE("markov property holds for the compression corner") {
  Rng rng(804);
  CpMap step = planted_step(rng, 2, 0.7);
  bqds::DilationHorizon dil = bqds::make_dilation(step, 4, block_projection(2));

  // x = 1 and x = p are exact; random x within 1e-9.
  for (std::size_t s = 0; s <= 2; ++s)
    for (std::size_t t = 0; s + t <= 4 && t <= 2; ++t) {
      CHECK(bqds::markov_check(dil, CMatrix::identity(4), s, t) < 1e-9);
      CHECK(bqds::markov_check(dil, dil.p, s, t) < 1e-9);
      for (int trial = 0; trial < 3; ++trial) {
        CMatrix x = bqds::random_matrix(rng, 4, 4);
        CHECK(bqds::markov_check(dil, x, s, t) < 1e-9);
      }
    }
}

TEST_CASE("projection chains decrease from the left action to the unit corner") {
  Rng rng(805);
  CpMap step = planted_step(rng, 2, 0.8);
  bqds::DilationHorizon dil = bqds::make_dilation(step, 3, block_projection(2));

  for (const CMatrix& q : {dil.p, dil.p_perp}) {
    bqds::ProjectionChain chain = bqds::increasing_projections(dil, q);
    REQUIRE(chain.ops.size() == 4);
    CHECK(chain.projection_residual < 1e-9);
    CHECK(chain.ordering_margin > -1e-9);
    CHECK(chain.terminal_gap < 1e-9);
    for (const CMatrix& op : chain.ops)
      CHECK(bqds::max_abs_diff(op.adjoint(), op) < 1e-10);
  }
}

TEST_CASE("the projection family stabilizes on embedded vectors") {
  Rng rng(806);
  CpMap step = planted_step(rng, 2, 0.75);
  bqds::DilationHorizon dil = bqds::make_dilation(step, 4, block_projection(2));

  for (std::size_t t = 0; t <= 4; ++t) {
    CMatrix x = bqds::random_matrix(rng, dil.ps.fiber(t).module.ambient_dim(),
                                    dil.ps.fiber(t).module.right_dim());
    for (const CMatrix& q : {dil.p, dil.p_perp}) {
      bqds::StabilizationReport rep = bqds::stabilization_check(dil, q, t, x);
      CHECK(rep.stable);
      CHECK(rep.stabilization_residual < 1e-9);
      CHECK(rep.unit_commutation < 1e-9);
    }
  }
}

TEST_CASE("automorphic steps dilate with trivial multiplicity") {
  Rng rng(807);
  // Conjugation by a block-diagonal unitary: an automorphism, mu = 1.
  CMatrix u1 = bqds::random_unitary(rng, 2);
  CMatrix u2 = bqds::random_unitary(rng, 2);
  CMatrix u(4, 4);
  u.set_block(0, 0, u1);
  u.set_block(2, 2, u2);
  CpMap step = CpMap::from_kraus(4, 4, {u});
  bqds::DilationHorizon dil = bqds::make_dilation(step, 3, block_projection(2));

  for (std::size_t t = 0; t <= 3; ++t)
    CHECK(dil.ps.fiber(t).module.ambient_dim() == 4);

  CMatrix x = bqds::random_matrix(rng, 4, 4);
  for (std::size_t s = 0; s <= 1; ++s)
    for (std::size_t t = 0; t <= 2; ++t)
      CHECK(bqds::markov_check(dil, x, s, t) < 1e-11);

  bqds::BlockEndoReport endo = bqds::block_endomorphism_check(dil, 3, 4242);
  CHECK(endo.corner_leakage < 1e-10);
  CHECK(endo.u_residual < 1e-10);
}

TEST_CASE("dilation endomorphisms respect the corner structure") {
  Rng rng(808);
  CpMap step = planted_step(rng, 2, 0.85);
  bqds::DilationHorizon dil = bqds::make_dilation(step, 3, block_projection(2));
  bqds::BlockEndoReport endo = bqds::block_endomorphism_check(dil, 3, 99);
  CHECK(endo.corner_leakage < 1e-9);
  CHECK(endo.u_residual < 1e-8);
}
