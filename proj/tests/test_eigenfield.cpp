#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "hcop/eigenfield.hpp"
#include "hcop/errors.hpp"

using namespace hcop;

TEST_CASE("field evaluation ties g, g1 and h to the distance bracket") {
  const FunctionField& f = testfix::field();
  // A point well inside a gap.
  const BinaryAngle w = BinaryAngle::from_fraction(1, 1024)
                            .plus(testfix::tree().deepest()[7].b);
  const FieldValues v = f.eval(w);
  REQUIRE_FALSE(v.on_K);
  REQUIRE(v.dist.lower > 0.0);
  const double mid = 0.5 * (v.dist.lower + v.dist.upper);
  CHECK(std::abs(std::abs(v.g) - std::pow(mid, -1.0 / 3.0)) <=
        v.g_bar + 1e-12 * std::abs(v.g));
  CHECK(std::abs(v.g1 - w.to_complex() * v.g) <= 1e-14 * std::abs(v.g));
  CHECK(std::abs(v.h - v.psi * std::cbrt(mid)) <=
        v.h_bar + 1e-12 * std::abs(v.h));
}

TEST_CASE("h vanishes on K and g is refused there") {
  const FunctionField& f = testfix::field();
  const BinaryAngle onk = testfix::tree().deepest()[3].a;
  const FieldValues v = f.eval(onk);
  CHECK(v.on_K);
  CHECK(v.h == cplx(0.0, 0.0));
  CHECK_THROWS_AS(f.g_at(onk), PrecisionExhausted);
}

TEST_CASE("multiplication identities hold pointwise for any lambda") {
  const FunctionField& f = testfix::field();
  std::vector<BinaryAngle> samples;
  for (int k = 0; k < 64; ++k) {
    samples.push_back(BinaryAngle::from_fraction(2 * k + 1, 128));
  }
  CHECK(verify_uhl(f, cplx(2.0, 0.0), samples) <= 1e-14);
  CHECK(verify_uhl(f, testfix::tree().deepest()[0].a.to_complex(), samples) <= 1e-14);
  CHECK(verify_uhl(f, cplx(0.36, -0.48), samples) <= 1e-14);
}

TEST_CASE("mesh weights account for the full complement measure") {
  const GapMesh& mesh = testfix::coarse_mesh();
  double total = 0.0;
  for (const MeshNode& n : mesh.nodes) total += n.weight;
  double klen = 0.0;
  for (const CantorInterval& iv : testfix::tree().deepest()) {
    klen += iv.b.minus(iv.a).to_double();
  }
  CHECK(std::abs(total + mesh.omitted_measure + klen - 1.0) <= 1e-12);
}

TEST_CASE("a cell cap that cannot resolve psi is refused") {
  CHECK_THROWS_AS(IdentityVerifier(testfix::field(), 1.0), AccuracyUnattainable);
}

TEST_CASE("analytic identity path meets its certified tolerance") {
  IdentityVerifier ver(testfix::field(), default_cell_cap(testfix::field()));
  const auto lambdas = default_lambdas(testfix::tree(), 4);
  const double tol = 1e-3 + std::pow(8.0, -11) / 7.0 + 1e-9;
  for (const BinaryAngle& lam : lambdas) {
    for (const IdentityRecord& r : ver.verify(lam)) {
      CAPTURE(r.id);
      CHECK(r.analytic_residual <= tol);
      CHECK(r.direct_residual <= r.analytic_residual + r.direct_bar);
    }
  }
}

TEST_CASE("octave pairs shrink dyadically in separation") {
  const auto pairs = octave_pairs(testfix::tree(), 5, 4);
  REQUIRE(pairs.size() == 20);
  double prev = 2.0;
  for (int o = 0; o < 5; ++o) {
    const auto& [z, s] = pairs[(std::size_t)(4 * o)];
    const double sep = std::abs(z.to_complex() - s.to_complex());
    CHECK(sep < prev);
    prev = sep;
  }
}

TEST_CASE("exclusion radius follows the factorial schedule") {
  CHECK(exclusion_radius(8) == doctest::Approx(1.0 / 40320.0).epsilon(1e-15));
}
