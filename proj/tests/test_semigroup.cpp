#include "bqds/errors.hpp"
#include "bqds/random.hpp"
#include "bqds/semigroup.hpp"
#include "doctest.h"
#include "oracles.hpp"

using bqds::CMatrix;
using bqds::CpMap;
using bqds::Rng;
using cplx = std::complex<double>;

namespace {

// Unital block step on M_{2d} carrying a planted one-step contraction.
bqds::DiscreteQds planted_block_step(Rng& rng, std::size_t d, double norm,
                                     std::size_t horizon) {
  CpMap phi1 = bqds::random_cp(rng, d, d, 2, true);
  CpMap phi2 = bqds::random_cp(rng, d, d, 2, true);
  bqds::GnsModule g1 = bqds::gns_module(phi1);
  bqds::GnsModule g2 = bqds::gns_module(phi2);
  CMatrix s = bqds::random_contraction(rng, g1.module.theta().mu(),
                                       g2.module.theta().mu(), norm);
  bqds::BilinearMap t{g2.module, g1.module,
                      bqds::kron(CMatrix::identity(d), s)};
  bqds::BlockCpMap b = bqds::build_from_contraction(phi1, phi2, g1, g2, t);
  return bqds::make_qds(b.full, horizon);
}

}  // namespace

TEST_CASE("make_qds validates shape and records flags") {
  Rng rng(601);
  CpMap unital = bqds::random_cp(rng, 2, 2, 2, true);
  bqds::DiscreteQds qds = bqds::make_qds(unital, 3);
  CHECK(qds.unital);
  CHECK(qds.contractive);
  CHECK(qds.horizon == 3);

  CpMap sub = bqds::random_cp(rng, 2, 2, 2, false);
  CHECK_FALSE(bqds::make_qds(sub, 2).unital);
  CHECK(bqds::make_qds(sub, 2).contractive);

  CHECK_THROWS_AS(bqds::make_qds(unital, 0), bqds::Error);
  CpMap rect = bqds::random_cp(rng, 2, 3, 2, false);
  CHECK_THROWS_AS(bqds::make_qds(rect, 2), bqds::Error);
}

TEST_CASE("fiber dimensions track the choi rank of the powers") {
  Rng rng(602);
  CpMap step = bqds::random_cp(rng, 2, 2, 2, true);
  bqds::DiscreteQds qds = bqds::make_qds(step, 4);
  bqds::InclusionSystem sys = bqds::inclusion_system(qds);
  REQUIRE(sys.modules.size() == 5);
  for (std::size_t t = 0; t <= 4; ++t) {
    CpMap pow = bqds::power(step, t);
    CMatrix choi = oracles::choi_by_definition(
        [&](const CMatrix& a) { return pow.apply(a); }, 2, 2);
    CHECK(sys.at(t).module.ambient_dim() == 2 * oracles::ge_rank(choi));
  }
}

TEST_CASE("unitary conjugation steps stay rank one at every time") {
  Rng rng(603);
  CMatrix u = bqds::random_unitary(rng, 3);
  CpMap step = CpMap::from_kraus(3, 3, {u});
  bqds::DiscreteQds qds = bqds::make_qds(step, 4);
  CHECK(qds.unital);
  bqds::InclusionSystem sys = bqds::inclusion_system(qds);
  for (std::size_t t = 0; t <= 4; ++t)
    CHECK(sys.at(t).module.ambient_dim() == 3);
  bqds::SystemChecks checks = bqds::verify_inclusion_system(sys);
  CHECK(checks.isometry < 1e-10);
  CHECK(checks.unit < 1e-10);
  CHECK(checks.coassociativity < 1e-10);
}

TEST_CASE("conditional expectation steps stabilize after one tick") {
  // step(a) = tr(a)/d 1 is idempotent, so every t >= 1 gives the same fiber.
  const std::size_t d = 2;
  std::vector<CMatrix> ks;
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = 0; q < d; ++q) {
      CMatrix e(d, d);
      e(p, q) = 1.0 / std::sqrt(double(d));
      ks.push_back(e);
    }
  CpMap step = CpMap::from_kraus(d, d, ks);
  CHECK(step.is_unital());
  bqds::InclusionSystem sys = bqds::inclusion_system(bqds::make_qds(step, 3));
  const std::size_t dim1 = sys.at(1).module.ambient_dim();
  CHECK(sys.at(2).module.ambient_dim() == dim1);
  CHECK(sys.at(3).module.ambient_dim() == dim1);
  CHECK(bqds::verify_inclusion_system(sys).isometry < 1e-9);
}

TEST_CASE("inclusion systems satisfy all structural identities") {
  Rng rng(604);
  for (int trial = 0; trial < 3; ++trial) {
    CpMap step = bqds::random_cp(rng, 2, 2, 2, true);
    bqds::InclusionSystem sys = bqds::inclusion_system(bqds::make_qds(step, 4));
    bqds::SystemChecks checks = bqds::verify_inclusion_system(sys);
    CHECK(checks.isometry < 1e-9);
    CHECK(checks.bilinearity < 1e-9);
    CHECK(checks.unit < 1e-9);
    CHECK(checks.coassociativity < 1e-9);
    CHECK(checks.cyclic_defect == 0);
  }
}

TEST_CASE("the unit reproduces the semigroup it came from") {
  Rng rng(605);
  CpMap step = bqds::random_cp(rng, 3, 3, 2, true);
  bqds::DiscreteQds qds = bqds::make_qds(step, 3);
  bqds::InclusionSystem sys = bqds::inclusion_system(qds);
  std::vector<bqds::MatrixUnitMap> maps = bqds::semigroup_from_unit(sys);
  REQUIRE(maps.size() == 4);
  for (std::size_t t = 0; t <= 3; ++t) {
    CpMap pow = bqds::power(step, t);
    CHECK(bqds::map_distance(maps[t], pow.as_unit_map()) < 1e-9);
  }
}

TEST_CASE("extract_morphism recovers the planted one-step contraction") {
  Rng rng(606);
  bqds::DiscreteQds qds = planted_block_step(rng, 2, 0.8, 4);
  bqds::MorphismExtraction ext = bqds::extract_morphism(qds);

  CHECK(ext.weak_residual < 1e-8);
  CHECK(ext.consistency_residual < 1e-8);
  REQUIRE(ext.morphism.maps.size() == 5);
  for (std::size_t t = 1; t <= 4; ++t) {
    CHECK(ext.reports[t - 1].reconstruction_residual < 1e-8);
    CHECK(ext.morphism.maps[t].mat.rows() ==
          ext.morphism.maps[t].target.ambient_dim());
    CHECK(bqds::operator_norm(ext.morphism.maps[t].mat) <
          1.0 + bqds::kContractionSlack);
  }

  // T_1 has the planted norm; deeper maps contract at least as fast as the
  // tensor powers.
  CHECK(bqds::operator_norm(ext.morphism.maps[1].mat) ==
        doctest::Approx(0.8).epsilon(1e-6));
  for (std::size_t t = 2; t <= 4; ++t)
    CHECK(bqds::operator_norm(ext.morphism.maps[t].mat) <
          std::pow(0.8, double(t)) + 1e-6);
}

TEST_CASE("the extracted morphism satisfies weak and recursion identities") {
  Rng rng(607);
  bqds::DiscreteQds qds = planted_block_step(rng, 2, 0.7, 3);
  bqds::MorphismExtraction ext = bqds::extract_morphism(qds);

  bqds::BlockCpMap b1 = bqds::verify_block(qds.step);
  bqds::DiscreteQds q1 = bqds::make_qds(b1.phi1, qds.horizon);
  bqds::DiscreteQds q2 = bqds::make_qds(b1.phi2, qds.horizon);
  bqds::InclusionSystem sys1 = bqds::inclusion_system(q1);
  bqds::InclusionSystem sys2 = bqds::inclusion_system(q2);

  CHECK(bqds::verify_morphism(ext.morphism, sys1, sys2, false) < 1e-8);

  // Rebuilding from T_1 alone reproduces every deeper map (uniqueness).
  bqds::Morphism rec =
      bqds::morphism_from_single(sys1, sys2, ext.morphism.maps[1]);
  for (std::size_t t = 1; t <= 3; ++t)
    CHECK(bqds::max_abs_diff(rec.maps[t].mat, ext.morphism.maps[t].mat) < 1e-8);
}

TEST_CASE("block semigroup round trips through its morphism") {
  Rng rng(608);
  bqds::DiscreteQds qds = planted_block_step(rng, 2, 0.75, 3);
  bqds::MorphismExtraction ext = bqds::extract_morphism(qds);

  bqds::BlockCpMap b1 = bqds::verify_block(qds.step);
  bqds::InclusionSystem sys1 =
      bqds::inclusion_system(bqds::make_qds(b1.phi1, qds.horizon));
  bqds::InclusionSystem sys2 =
      bqds::inclusion_system(bqds::make_qds(b1.phi2, qds.horizon));

  bqds::DiscreteQds back =
      bqds::block_semigroup_from_morphism(sys1, sys2, ext.morphism);
  CHECK(bqds::map_distance(back.step.as_unit_map(), qds.step.as_unit_map()) <
        1e-8);
}

TEST_CASE("identity corners force the identity morphism") {
  // phi1 = phi2 = psi = id: the block step is conjugation-free transport of
  // both corners; T_t must be the identity map at every level.
  const std::size_t d = 2;
  bqds::DiscreteQds qds = bqds::make_qds(bqds::identity_cpmap(2 * d), 3);
  bqds::MorphismExtraction ext = bqds::extract_morphism(qds);
  for (std::size_t t = 1; t <= 3; ++t) {
    const CMatrix& m = ext.morphism.maps[t].mat;
    CHECK(bqds::max_abs_diff(m, CMatrix::identity(m.rows())) < 1e-9);
  }
  bqds::BlockCpMap b1 = bqds::verify_block(qds.step);
  bqds::InclusionSystem sys =
      bqds::inclusion_system(bqds::make_qds(b1.phi1, qds.horizon));
  CHECK(bqds::verify_morphism(ext.morphism, sys, sys, true) < 1e-9);
}

TEST_CASE("zero off-diagonal corners force the zero morphism") {
  Rng rng(609);
  CpMap phi1 = bqds::random_cp(rng, 2, 2, 2, true);
  CpMap phi2 = bqds::random_cp(rng, 2, 2, 2, true);
  std::vector<CMatrix> ks;
  for (const CMatrix& k : phi1.kraus()) {
    CMatrix big(4, 4);
    big.set_block(0, 0, k);
    ks.push_back(big);
  }
  for (const CMatrix& l : phi2.kraus()) {
    CMatrix big(4, 4);
    big.set_block(2, 2, l);
    ks.push_back(big);
  }
  bqds::DiscreteQds qds = bqds::make_qds(CpMap::from_kraus(4, 4, ks), 3);
  bqds::MorphismExtraction ext = bqds::extract_morphism(qds);
  for (std::size_t t = 1; t <= 3; ++t)
    CHECK(ext.morphism.maps[t].mat.max_abs() < 1e-9);
}

TEST_CASE("extraction survives steps with degenerate choi spectra") {
  // Corners with flat Choi spectrum exercise the eigenbasis ambiguity: the
  // canonical frames of step^t are then only defined up to rotation, which
  // the given-frame extraction must absorb.
  Rng rng(610);
  const std::size_t d = 2;
  CMatrix z(2, 2);
  z(0, 0) = 1.0 / std::sqrt(2.0);
  z(1, 1) = -1.0 / std::sqrt(2.0);
  CMatrix id_half = (1.0 / std::sqrt(2.0)) * CMatrix::identity(2);
  CpMap phi = CpMap::from_kraus(2, 2, {id_half, z});
  CHECK(phi.is_unital());
  CHECK(phi.choi_rank() == 2);

  bqds::GnsModule g1 = bqds::gns_module(phi);
  bqds::GnsModule g2 = bqds::gns_module(phi);
  CMatrix s = bqds::random_contraction(rng, 2, 2, 0.7);
  bqds::BilinearMap t{g2.module, g1.module, bqds::kron(CMatrix::identity(d), s)};
  bqds::BlockCpMap b = bqds::build_from_contraction(phi, phi, g1, g2, t);
  bqds::DiscreteQds qds = bqds::make_qds(b.full, 3);

  bqds::MorphismExtraction ext = bqds::extract_morphism(qds);
  CHECK(ext.weak_residual < 1e-7);
  for (std::size_t t2 = 1; t2 <= 3; ++t2)
    CHECK(ext.reports[t2 - 1].reconstruction_residual < 1e-7);
}

TEST_CASE("growth exponent bounds every fiber norm") {
  Rng rng(611);
  bqds::DiscreteQds qds = planted_block_step(rng, 2, 0.9, 4);
  bqds::MorphismExtraction ext = bqds::extract_morphism(qds);
  for (std::size_t t = 1; t <= 4; ++t)
    CHECK(bqds::operator_norm(ext.morphism.maps[t].mat) <=
          std::exp(double(t) * ext.morphism.growth) + 1e-9);
}
