#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "hcop/errors.hpp"
#include "hcop/galerkin.hpp"

using namespace hcop;

TEST_CASE("eigenvalue parameter sets are nested across m") {
  const auto l64 = default_lambdas(testfix::tree(), 64);
  REQUIRE(l64.size() == 64);
  for (int m : {8, 16, 32}) {
    const auto lm = default_lambdas(testfix::tree(), m);
    REQUIRE((int)lm.size() == m);
    for (int i = 0; i < m; ++i) {
      CHECK(lm[(std::size_t)i].raw() == l64[(std::size_t)(i * (64 / m))].raw());
    }
  }
}

TEST_CASE("model structural identities hold on the discrete measure") {
  const GalerkinModel& md = testfix::model64();
  REQUIRE(md.rank == 64);
  CHECK(md.condition > 1.0);
  // Gram is Hermitian PSD.
  CHECK((md.gram - md.gram.adjoint()).norm() <= 1e-12 * md.gram.norm());
  CHECK(md.gram_eigs.minCoeff() >= -1e-10 * md.gram_eigs.maxCoeff());
  // The compression of multiplication by w is a contraction: the measure is
  // a plain node sum, so |w| = 1 makes U exactly unitary on it.
  CHECK(md.U_proj.operatorNorm() <= 1.0 + 1e-10);
  // T is similar to diag(lambda): spectrum matches to rounding.
  Eigen::ComplexEigenSolver<MatrixXcd> es(md.T_mat);
  for (int i = 0; i < md.rank; ++i) {
    double best = 2.0;
    for (int j = 0; j < md.m(); ++j) {
      best = std::min(best, std::abs(es.eigenvalues()(i) - md.lambda_points(j)));
    }
    CHECK(best <= 1e-8);
  }
  // ||U^{-1} h|| = ||h|| exactly nodewise.
  CHECK(std::abs(md.norm_h - md.norm_uinv_h) <= 1e-13 * md.norm_h);
}

TEST_CASE("frame is orthonormal in the gram metric") {
  const GalerkinModel& md = testfix::model64();
  const MatrixXcd gramW = md.frame.adjoint() * md.gram * md.frame;
  CHECK((gramW - MatrixXcd::Identity(md.rank, md.rank)).norm() <= 1e-10);
}

TEST_CASE("submodel slices are bit-identical to the raw sums") {
  const GalerkinModel& md = testfix::model64();
  std::vector<int> idx;
  for (int i = 0; i < 64; i += 8) idx.push_back(i);
  const GalerkinModel sub = submodel(md, idx);
  REQUIRE(sub.m() == 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      CHECK(sub.gram(i, j) == md.gram(idx[(std::size_t)i], idx[(std::size_t)j]));
    }
    CHECK(sub.b_h(i) == md.b_h(idx[(std::size_t)i]));
  }
}

TEST_CASE("hyperplane normals annihilate the invariance subspaces") {
  const GalerkinModel& md = testfix::model64();
  const Hyperplanes hp = hyperplanes(md);
  CHECK(hp.dim == 63);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const MatrixXcd coords = md.frame.adjoint() * md.gram;  // columns: h_j
  for (int trial = 0; trial < 8; ++trial) {
    VectorXcd c(64);
    for (int i = 0; i < 64; ++i) c(i) = cplx(g(rng), g(rng));
    // Project onto sum c_j = 0 and test against x.
    VectorXcd c0 = c;
    c0.array() -= c.sum() / 64.0;
    const VectorXcd u = coords * c0;
    CHECK(std::abs(hp.x.dot(u)) <= 1e-8 * u.norm());
    // Project onto sum d_j / lambda_j = 0 and test against y.
    VectorXcd d = c;
    cplx s = 0.0;
    for (int i = 0; i < 64; ++i) s += d(i) / md.lambda_points(i);
    for (int i = 0; i < 64; ++i) d(i) -= s * md.lambda_points(i) / 64.0;
    cplx recheck = 0.0;
    for (int i = 0; i < 64; ++i) recheck += d(i) / md.lambda_points(i);
    REQUIRE(std::abs(recheck) <= 1e-10 * d.norm());
    const VectorXcd v = coords * d;
    CHECK(std::abs(hp.y.dot(v)) <= 1e-8 * v.norm());
  }
}

TEST_CASE("membership residuals match the stored values") {
  const GalerkinModel& md = testfix::model64();
  const auto [rh, ruh] = membership_residuals(md);
  CHECK(rh == doctest::Approx(md.res_h).epsilon(1e-12));
  CHECK(ruh == doctest::Approx(md.res_uinv_h).epsilon(1e-12));
  CHECK(md.res_h > 1e-3);  // h is genuinely outside the span
}

TEST_CASE("appending h to the generators degenerates the hyperplanes") {
  const GalerkinModel withh = build_model(
      testfix::field(), testfix::coarse_mesh(),
      default_lambdas(testfix::tree(), 8), true);
  CHECK(withh.includes_h);
  CHECK(withh.res_h <= 1e-10 * withh.norm_h);
  CHECK_THROWS_AS(hyperplanes(withh), HyperplaneDegenerate);
}

TEST_CASE("lambdas closer than the separation floor are rejected") {
  const auto& leaves = testfix::tree().deepest();
  std::vector<BinaryAngle> bad = {leaves[0].a, leaves[0].b};  // < 1/8! apart
  CHECK_THROWS_AS(
      build_model(testfix::field(), testfix::coarse_mesh(), bad),
      ConfigInvalid);
}

TEST_CASE("model json round trip is exact") {
  std::vector<int> idx = {0, 16, 32, 48};
  const GalerkinModel sub = submodel(testfix::model64(), idx);
  const GalerkinModel back = model_from_json(model_to_json(sub));
  CHECK(back.m() == sub.m());
  CHECK((back.gram - sub.gram).norm() == 0.0);
  CHECK((back.T_mat - sub.T_mat).norm() == 0.0);
  CHECK((back.frame - sub.frame).norm() == 0.0);
  CHECK(back.res_h == sub.res_h);
  for (int i = 0; i < 4; ++i) {
    CHECK(back.lambdas[(std::size_t)i].raw() == sub.lambdas[(std::size_t)i].raw());
  }
}
