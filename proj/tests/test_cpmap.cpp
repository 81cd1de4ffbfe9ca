#include "bqds/cpmap.hpp"
#include "bqds/errors.hpp"
#include "bqds/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

using bqds::CMatrix;
using bqds::CpMap;
using bqds::Rng;
using cplx = std::complex<double>;

TEST_CASE("choi matrix matches the entrywise definition") {
  Rng rng(301);
  for (auto [n, d] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 2}, {2, 4}}) {
    CpMap phi = bqds::random_cp(rng, n, d, 2, false);
    CMatrix want = oracles::choi_by_definition(
        [&](const CMatrix& a) { return phi.apply(a); }, n, d);
    CHECK(bqds::max_abs_diff(phi.choi(), want) < 1e-12);
  }
}

TEST_CASE("from_kraus preserves the action while canonicalizing the family") {
  Rng rng(302);
  std::vector<CMatrix> ks{bqds::random_matrix(rng, 3, 2),
                          bqds::random_matrix(rng, 3, 2),
                          bqds::random_matrix(rng, 3, 2)};
  CpMap phi = CpMap::from_kraus(3, 2, ks);
  for (int trial = 0; trial < 5; ++trial) {
    CMatrix a = bqds::random_matrix(rng, 3, 3);
    CHECK(bqds::max_abs_diff(phi.apply(a), oracles::naive_kraus_apply(ks, a)) < 1e-12);
  }

  // Duplicated operator: the canonical family has one member sqrt(2) K.
  CMatrix k = bqds::random_matrix(rng, 2, 2);
  CpMap dup = CpMap::from_kraus(2, 2, {k, k});
  CHECK(dup.choi_rank() == 1);
  CMatrix a = bqds::random_matrix(rng, 2, 2);
  CHECK(bqds::max_abs_diff(dup.apply(a), oracles::naive_kraus_apply({k, k}, a)) < 1e-12);

  CHECK_THROWS_AS(CpMap::from_kraus(2, 2, {}), bqds::Error);
}

TEST_CASE("from_choi round trips and rejects indefinite input") {
  Rng rng(303);
  CpMap phi = bqds::random_cp(rng, 2, 3, 2, false);
  CpMap back = CpMap::from_choi(2, 3, phi.choi());
  CHECK(bqds::max_abs_diff(back.choi(), phi.choi()) < 1e-11);

  CMatrix bad = phi.choi();
  bad(0, 0) -= 5.0;  // drives an eigenvalue negative
  try {
    CpMap::from_choi(2, 3, bad);
    FAIL("expected NotCP");
  } catch (const bqds::Error& e) {
    CHECK(e.kind() == bqds::ErrorKind::NotCP);
    REQUIRE(e.has_witness());
    CHECK(e.witness() < 0.0);
    // Witness is a genuine eigenvalue estimate of the rejected matrix.
    oracles::BottomEig bot = oracles::bottom_eig(bad);
    CHECK(e.witness() == doctest::Approx(bot.value).epsilon(1e-6));
  }
}

TEST_CASE("compose applies the left argument first") {
  Rng rng(304);
  CpMap phi = bqds::random_cp(rng, 2, 3, 2, false);  // M_2 -> M_3
  CpMap psi = bqds::random_cp(rng, 3, 2, 2, false);  // M_3 -> M_2
  CpMap chain = bqds::compose(phi, psi);
  CHECK(chain.in_dim() == 2);
  CHECK(chain.out_dim() == 2);
  CMatrix a = bqds::random_matrix(rng, 2, 2);
  CHECK(bqds::max_abs_diff(chain.apply(a), psi.apply(phi.apply(a))) < 1e-11);
}

TEST_CASE("power iterates composition and power zero is the identity") {
  Rng rng(305);
  CpMap phi = bqds::random_cp(rng, 2, 2, 2, true);
  CpMap p3 = bqds::power(phi, 3);
  CMatrix a = bqds::random_matrix(rng, 2, 2);
  CHECK(bqds::max_abs_diff(p3.apply(a), phi.apply(phi.apply(phi.apply(a)))) < 1e-10);

  CpMap p0 = bqds::power(phi, 0);
  CHECK(p0.choi_rank() == 1);
  CHECK(bqds::max_abs_diff(p0.apply(a), a) < 1e-13);

  CpMap id = bqds::identity_cpmap(3);
  CHECK(id.choi_rank() == 1);
  CHECK(bqds::max_abs_diff(id.kraus().front(), CMatrix::identity(3)) < 1e-12);
}

TEST_CASE("matrix unit maps support sums, scalars and adjoints") {
  Rng rng(306);
  CpMap phi = bqds::random_cp(rng, 2, 2, 2, false);
  bqds::MatrixUnitMap f = phi.as_unit_map();
  bqds::MatrixUnitMap g = bqds::adjoint_map(f);
  CMatrix a = bqds::random_matrix(rng, 2, 2);
  CHECK(bqds::max_abs_diff(g.apply(a), f.apply(a.adjoint()).adjoint()) < 1e-12);

  bqds::MatrixUnitMap sum = f + g;
  CHECK(bqds::max_abs_diff(sum.apply(a), f.apply(a) + g.apply(a)) < 1e-12);
  bqds::MatrixUnitMap scaled = cplx(0, 2) * f;
  CHECK(bqds::max_abs_diff(scaled.apply(a), cplx(0, 2) * f.apply(a)) < 1e-12);
  CHECK(bqds::map_distance(f, f) == 0.0);

  CHECK(bqds::is_cp(f).psd);
  bqds::MatrixUnitMap neg = cplx(-1, 0) * f;
  CHECK_FALSE(bqds::is_cp(neg).psd);
}

TEST_CASE("minimal stinespring reproduces the map with minimal multiplicity") {
  Rng rng(307);
  for (bool unital : {false, true}) {
    CpMap phi = bqds::random_cp(rng, 3, 2, 2, unital);
    bqds::StinespringRep rep = bqds::minimal_stinespring(phi);
    CHECK(rep.r == phi.choi_rank());
    for (int trial = 0; trial < 4; ++trial) {
      CMatrix a = bqds::random_matrix(rng, 3, 3);
      CMatrix via = rep.v.adjoint() * rep.pi(a) * rep.v;
      CHECK(bqds::max_abs_diff(via, phi.apply(a)) < 1e-11);
    }
    CHECK(rep.is_unital() == unital);
    if (unital)
      CHECK(bqds::max_abs_diff(rep.v.adjoint() * rep.v, CMatrix::identity(2)) < 1e-10);
  }
}

TEST_CASE("random_cp produces exactly unital maps when asked") {
  Rng rng(308);
  CpMap phi = bqds::random_cp(rng, 2, 3, 2, true);
  CHECK(phi.is_unital());
  CHECK(bqds::max_abs_diff(phi.apply(CMatrix::identity(2)), CMatrix::identity(3)) < 1e-12);
  CpMap sub = bqds::random_cp(rng, 2, 3, 2, false);
  CHECK(sub.is_contractive());
}
