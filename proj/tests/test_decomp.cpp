#include <Eigen/Dense>

#include "doctest.h"
#include "fixtures.hpp"
#include "hcop/decomp.hpp"
#include "hcop/errors.hpp"

using namespace hcop;

TEST_CASE("unitary plus rank-2 splitting passes its audit") {
  const GalerkinModel& md = testfix::model64();
  const Splitting s = lemma_te_split(md);
  REQUIRE(s.branch == "te");
  const SplitAudit a = audit_splitting(s, md);
  CHECK(a.unitarity_defect <= 1e-8);
  REQUIRE(a.singvals_R.size() >= 3);
  CHECK(a.singvals_R[2] <= 1e-8 * a.singvals_R[0]);
  CHECK(a.rank_excess <= 1e-8);
  CHECK(a.rank_excess_A <= 1e-8);
  CHECK(a.resum <= 1e-12 * s.T.norm());
  CHECK(a.spec_V_defect <= 1e-8);
  CHECK(a.spec_T_checked);
  CHECK(a.spec_T_defect <= 1e-8);
}

TEST_CASE("contraction splitting: V = PU, rank-1 remainder") {
  const GalerkinModel& md = testfix::model64();
  const Splitting s = contraction_split(md);
  REQUIRE(s.branch == "contraction");
  const SplitAudit a = audit_splitting(s, md);
  CHECK(a.norm_V <= 1.0 + 1e-10);
  REQUIRE(a.singvals_R.size() >= 2);
  CHECK(a.singvals_R[1] <= 1e-8 * a.singvals_R[0]);
  CHECK(a.resum <= 1e-12 * s.T.norm());
  CHECK((s.V - md.U_proj).norm() == 0.0);
}

TEST_CASE("zeroing the rank-one functional collapses the remainder") {
  const GalerkinModel& md = testfix::model64();
  const Splitting s = lemma_te_split(md, /*zero_g=*/true);
  CHECK(s.g_zeroed);
  CHECK(s.branch == "unitary");
  CHECK(s.R.norm() == 0.0);
  CHECK((s.T - md.U_proj).norm() == 0.0);
  const SplitAudit a = audit_splitting(s, md);
  CHECK(a.resum == 0.0);
}

TEST_CASE("h inside the span falls back to the unitary branch") {
  const GalerkinModel withh = build_model(
      testfix::field(), testfix::coarse_mesh(),
      default_lambdas(testfix::tree(), 8), true);
  const Splitting s = lemma_te_split(withh);
  CHECK(s.branch == "unitary");
  CHECK(s.includes_h);
  const SplitAudit a = audit_splitting(s, withh);
  REQUIRE(a.singvals_R.size() >= 2);
  CHECK(a.singvals_R[1] <= 1e-8 * std::max(a.singvals_R[0], 1e-300));
  CHECK(a.resum <= 1e-12 * std::max(s.T.norm(), 1.0));
}

TEST_CASE("audit catches a corrupted splitting") {
  const GalerkinModel& md = testfix::model64();
  Splitting s = lemma_te_split(md);
  s.V(0, 0) += 1e-3;  // breaks unitarity and the resummation
  CHECK_THROWS_AS(audit_splitting(s, md), AuditFailure);
}
