#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "hcop/decomp.hpp"
#include "hcop/errors.hpp"
#include "hcop/orbitlab.hpp"

using namespace hcop;

TEST_CASE("irrational rotation covers the marginal grid (Weyl oracle)") {
  MatrixXcd rot(1, 1);
  rot(0, 0) = std::polar(1.0, 2.0 * std::numbers::pi / std::numbers::sqrt2);
  const VectorXcd one = VectorXcd::Ones(1);
  const OrbitRun run = run_orbit(rot, one, 100000, {one});
  REQUIRE_FALSE(run.coverage.empty());
  CHECK(run.coverage[0] >= 0.95);
  CHECK(run.max_lognorm_dev <= 1e-10);  // 1e5 rounding steps
}

TEST_CASE("the identity orbit visits exactly one cell per marginal") {
  const MatrixXcd id = MatrixXcd::Identity(4, 4);
  const VectorXcd x0 = random_unit_vector(4, 3);
  const OrbitRun run = run_orbit(id, x0, 500, default_directions(4, 3));
  for (std::size_t d = 0; d < run.visited_cells.size(); ++d) {
    CHECK(run.visited_cells[d] == 2);  // one Re cell + one Im cell
  }
}

TEST_CASE("unitary orbits preserve the norm to rounding") {
  const Splitting s = lemma_te_split(testfix::model64());
  const OrbitRun run = run_orbit(s.V, random_unit_vector(s.V.rows(), 17),
                                 10000, default_directions((int)s.V.rows(), 17));
  CHECK(run.max_lognorm_dev <= 1e-5);
  CHECK(run.lognorm_variance <= 1e-10);
}

TEST_CASE("perturbed operator has strictly larger log-norm variance") {
  const GalerkinModel& md = testfix::model64();
  const Splitting s = lemma_te_split(md);
  const VectorXcd x0 = random_unit_vector(md.rank, 5);
  const auto dirs = default_directions(md.rank, 5);
  const OrbitRun rt = run_orbit(md.T_mat, x0, 5000, dirs);
  const OrbitRun rv = run_orbit(s.V, x0, 5000, dirs);
  CHECK(rt.lognorm_variance > rv.lognorm_variance);
}

TEST_CASE("span residual is zero for the full set and positive otherwise") {
  const GalerkinModel& md = testfix::model64();
  std::vector<int> all(64);
  for (int i = 0; i < 64; ++i) all[(std::size_t)i] = i;
  CHECK(span_residual(md, all) <= 1e-6);
  std::vector<int> most = all;
  most.pop_back();
  const double partial = span_residual(md, most);
  CHECK(partial > 1e-3);
  std::vector<int> half(all.begin(), all.begin() + 32);
  CHECK(span_residual(md, half) >= partial - 1e-12);
}

TEST_CASE("density surrogate is seeded, bounded and validated") {
  const GalerkinModel& md = testfix::model64();
  const double d1 = density_surrogate(md, 0.5, 99);
  const double d2 = density_surrogate(md, 0.5, 99);
  CHECK(d1 == d2);
  CHECK(d1 >= 0.0);
  CHECK(d1 <= 1.0 + 1e-12);
  CHECK(density_surrogate(md, 1.0, 99) <= 1e-6);
  CHECK_THROWS_AS(density_surrogate(md, 0.0, 99), ConfigInvalid);
}

TEST_CASE("crowding report provides medians per nested model") {
  const GalerkinModel& md = testfix::model64();
  std::vector<int> idx8, idx16;
  for (int i = 0; i < 64; i += 8) idx8.push_back(i);
  for (int i = 0; i < 64; i += 4) idx16.push_back(i);
  const GalerkinModel m8 = submodel(md, idx8);
  const GalerkinModel m16 = submodel(md, idx16);
  const auto rows = eigen_crowding_report({&m8, &m16}, 2000, 0.05, 3, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].m == 8);
  CHECK(rows[1].m == 16);
  for (const CrowdingRow& r : rows) {
    CHECK(r.min_separation > 0.0);
    CHECK(r.lognorm_variance_T > r.lognorm_variance_V);
    for (double c : r.coverage) {
      CHECK(c > 0.0);
      CHECK(c <= 1.0 + 1e-12);
    }
  }
}
