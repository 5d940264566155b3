#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "hcop/cantor.hpp"
#include "hcop/errors.hpp"

using namespace hcop;

TEST_CASE("constructed points hit the level set and get witnessed arcs") {
  const LevelSetCover& cover = testfix::cover();
  CHECK(cover.witnessed_count() >= 512);
  for (const CoverArc& arc : cover.arcs) {
    if (arc.witnessed) CHECK(arc.witness_residual <= cover.delta);
  }
}

TEST_CASE("single constructed point evaluates to i") {
  LevelPointSpec spec;
  const LevelPoint p = construct_level_point(spec);
  CHECK(p.residual <= 1e-8);
  LacunarySeries s;
  CHECK(std::abs(s.gamma_eval(p.t).first - cplx(0.0, 1.0)) <= 1e-8 + s.tail());
}

TEST_CASE("depth-8 tree passes the nesting, ordering and shrinkage audit") {
  const CantorTree& tree = testfix::tree();
  CHECK(tree.depth == 8);
  CHECK(tree.deepest().size() == 256);
  const CantorAudit audit = audit_cantor_tree(tree);
  CHECK(audit.com1_nesting);
  CHECK(audit.com2_ordering);
  CHECK(audit.com3_shrinkage);
  CHECK(audit.gap_measure_collapse);
  CHECK(audit.worst_shrinkage_ratio < 1.0);
}

TEST_CASE("tree deeper than the witnessed family is rejected") {
  CHECK_THROWS_AS(build_cantor(testfix::cover(), 9), DepthUnreachable);
}

TEST_CASE("distance bracket vanishes on K and is positive in gaps") {
  const CantorTree& tree = testfix::tree();
  const DistBracket on = dist_to_K(tree.deepest()[0].a, tree);
  CHECK(on.lower == 0.0);
  // Midpoint of the forward gap after the last interval of the first half.
  const BinaryAngle far = BinaryAngle::from_fraction(1, 1024)
                              .plus(tree.deepest()[7].b);
  const DistBracket off = dist_to_K(far, tree);
  CHECK(off.lower > 0.0);
  CHECK(off.upper >= off.lower);
}

TEST_CASE("straight-gap quadrature reproduces the closed form") {
  for (double L : {0.01, 0.1, 0.4}) {
    const double q = straight_gap_quadrature(L, 2.0 / 3.0);
    const double c = straight_gap_closed_form(L, 2.0 / 3.0);
    CHECK(std::abs(q - c) <= 1e-12 * std::abs(c));
  }
}

TEST_CASE("integrability report converges and rejects alpha >= 1") {
  const IntegrabilityReport rep = integrability_report(testfix::tree(), 2.0 / 3.0);
  CHECK(rep.total > 0.0);
  CHECK(std::isfinite(rep.total));
  CHECK_THROWS_AS(integrability_report(testfix::tree(), 1.5), UnsupportedExponent);
}

TEST_CASE("tree json round trip is exact") {
  const CantorTree& tree = testfix::tree();
  const CantorTree back = cantor_tree_from_json(cantor_tree_to_json(tree));
  REQUIRE(back.depth == tree.depth);
  for (std::size_t l = 0; l < tree.levels.size(); ++l) {
    REQUIRE(back.levels[l].size() == tree.levels[l].size());
    for (std::size_t i = 0; i < tree.levels[l].size(); ++i) {
      CHECK(back.levels[l][i].a.raw() == tree.levels[l][i].a.raw());
      CHECK(back.levels[l][i].b.raw() == tree.levels[l][i].b.raw());
    }
  }
}
