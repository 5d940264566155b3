#include "hcop/orbitlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hcop/decomp.hpp"
#include "hcop/errors.hpp"

namespace hcop {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

OrbitRun run_orbit(const MatrixXcd& mat, const VectorXcd& x0, int n_steps,
                   const std::vector<VectorXcd>& directions,
                   const OrbitOptions& opts, const OrbitSink& sink) {
  if (mat.rows() != mat.cols() || mat.rows() != x0.size()) {
    throw ConfigInvalid("run_orbit: matrix must be square and match x0");
  }
  if (!(x0.norm() > 0.0)) throw ConfigInvalid("run_orbit: x0 must be nonzero");
  if (!(opts.eps > 0.0 && opts.eps <= 2.0)) {
    throw ConfigInvalid("run_orbit: eps must lie in (0, 2]");
  }

  const int ndir = (int)directions.size();
  const int bins = (int)std::ceil(2.0 / opts.eps);
  const int cells = 2 * bins;  // Re marginal + Im marginal
  std::vector<std::vector<char>> visited(
      (std::size_t)ndir, std::vector<char>((std::size_t)cells, 0));
  auto mark = [&](int d, double v, int half) {
    int b = (int)std::floor((v + 1.0) / opts.eps);
    b = std::clamp(b, 0, bins - 1);
    visited[(std::size_t)d][(std::size_t)(half * bins + b)] = 1;
  };

  OrbitRun run;
  run.steps = n_steps;
  run.cells_per_direction = cells;
  run.lognorms.reserve((std::size_t)n_steps + 1);

  VectorXcd x = x0;
  double logn = 0.0;  // accumulated log of renormalization factors
  std::vector<cplx> proj((std::size_t)ndir);
  for (int n = 0; n <= n_steps; ++n) {
    const double nr = x.norm();
    if (!std::isfinite(nr) || nr == 0.0) {
      throw PrecisionExhausted(
          "run_orbit: overflow despite renormalization at step " +
          std::to_string(n));
    }
    const double lognorm = logn + std::log(nr);
    run.lognorms.push_back(lognorm);
    for (int d = 0; d < ndir; ++d) {
      const cplx z = directions[(std::size_t)d].dot(x) / nr;
      proj[(std::size_t)d] = z;
      mark(d, z.real(), 0);
      mark(d, z.imag(), 1);
    }
    if (sink) sink(n, lognorm, proj);
    if (n == n_steps) break;
    x = mat * x;
    if ((n + 1) % opts.renorm_every == 0) {
      const double s = x.norm();
      if (!std::isfinite(s) || s == 0.0) {
        throw PrecisionExhausted(
            "run_orbit: overflow despite renormalization at step " +
            std::to_string(n + 1));
      }
      x /= s;
      logn += std::log(s);
    }
  }

  const double base = run.lognorms.front();
  double mean = 0.0;
  for (double v : run.lognorms) {
    run.max_lognorm_dev = std::max(run.max_lognorm_dev, std::abs(v - base));
    mean += v;
  }
  mean /= (double)run.lognorms.size();
  double var = 0.0;
  for (double v : run.lognorms) var += (v - mean) * (v - mean);
  run.lognorm_variance = var / (double)run.lognorms.size();

  run.coverage.resize((std::size_t)ndir);
  run.visited_cells.resize((std::size_t)ndir);
  for (int d = 0; d < ndir; ++d) {
    const auto& vd = visited[(std::size_t)d];
    const int cnt = (int)std::count(vd.begin(), vd.end(), (char)1);
    run.visited_cells[(std::size_t)d] = cnt;
    run.coverage[(std::size_t)d] = (double)cnt / (double)cells;
  }
  return run;
}

VectorXcd random_unit_vector(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cplx(gauss(rng), gauss(rng));
  v.normalize();
  return v;
}

std::vector<VectorXcd> default_directions(int dim, std::uint64_t seed) {
  std::vector<VectorXcd> dirs;
  const int fixed = std::min(3, dim);
  for (int k = 0; k < fixed; ++k) {
    dirs.push_back(VectorXcd::Unit(dim, k));
  }
  dirs.push_back(random_unit_vector(dim, seed * 0x9E3779B97F4A7C15ULL + 1));
  return dirs;
}

double span_residual(const GalerkinModel& model,
                     const std::vector<int>& subset) {
  if (subset.empty()) return 1.0;
  // Frame coordinates of the selected generators: columns of W^H G.
  MatrixXcd cols(model.rank, (Eigen::Index)subset.size());
  const MatrixXcd coords = model.frame.adjoint() * model.gram;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    const int j = subset[a];
    if (j < 0 || j >= (int)model.gram.cols()) {
      throw ConfigInvalid("span_residual: index out of range");
    }
    cols.col((Eigen::Index)a) = coords.col(j);
  }
  // Orthonormal basis of the subset span; residual of frame axis e_k is
  // sqrt(1 - ||row k of Q||^2).
  Eigen::ColPivHouseholderQR<MatrixXcd> qr(cols);
  const Eigen::Index r = qr.rank();
  MatrixXcd Q = qr.householderQ() * MatrixXcd::Identity(model.rank, r);
  double worst = 0.0;
  for (int k = 0; k < model.rank; ++k) {
    const double inside = std::min(1.0, Q.row(k).squaredNorm());
    worst = std::max(worst, std::sqrt(std::max(0.0, 1.0 - inside)));
  }
  return worst;
}

double density_surrogate(const GalerkinModel& model, double subset_fraction,
                         std::uint64_t rng_seed, int trials) {
  if (model.m() < 4) {
    throw ConfigInvalid("density_surrogate: need a model with m >= 4");
  }
  if (!(subset_fraction > 0.0 && subset_fraction <= 1.0)) {
    throw ConfigInvalid("density_surrogate: fraction must lie in (0, 1]");
  }
  const int m = model.m();
  const int k = std::max(1, (int)std::lround(subset_fraction * m));
  std::mt19937_64 rng(rng_seed);
  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  std::vector<double> vals;
  vals.reserve((std::size_t)trials);
  for (int t = 0; t < trials; ++t) {
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> subset(all.begin(), all.begin() + k);
    vals.push_back(span_residual(model, subset));
  }
  return median(std::move(vals));
}

std::vector<CrowdingRow> eigen_crowding_report(
    const std::vector<const GalerkinModel*>& models, int steps, double eps,
    int n_seeds, std::uint64_t seed0) {
  std::vector<CrowdingRow> rows;
  rows.reserve(models.size());
  OrbitOptions opts;
  opts.eps = eps;
  for (const GalerkinModel* mp : models) {
    const GalerkinModel& model = *mp;
    CrowdingRow row;
    row.m = model.m();
    row.condition = model.condition;
    row.min_separation = std::numeric_limits<double>::infinity();
    for (int i = 0; i < model.m(); ++i) {
      for (int j = i + 1; j < model.m(); ++j) {
        row.min_separation =
            std::min(row.min_separation,
                     chordal_distance(model.lambdas[(std::size_t)i],
                                      model.lambdas[(std::size_t)j]));
      }
    }
    if (model.m() == 1) row.min_separation = 0.0;

    const Splitting split = lemma_te_split(model);
    const int fixed = std::min(3, model.rank);
    std::vector<std::vector<double>> cov((std::size_t)fixed);
    std::vector<double> var_t, var_v;
    for (int s = 0; s < n_seeds; ++s) {
      const std::uint64_t seed = seed0 + (std::uint64_t)s;
      const VectorXcd x0 = random_unit_vector(
          model.rank, seed * 0x2545F4914F6CDD1DULL + (std::uint64_t)model.m());
      const auto dirs = default_directions(model.rank, seed);
      const OrbitRun rt = run_orbit(model.T_mat, x0, steps, dirs, opts);
      const OrbitRun rv = run_orbit(split.V, x0, steps, dirs, opts);
      for (int d = 0; d < fixed; ++d) {
        cov[(std::size_t)d].push_back(rt.coverage[(std::size_t)d]);
      }
      var_t.push_back(rt.lognorm_variance);
      var_v.push_back(rv.lognorm_variance);
    }
    row.coverage.resize((std::size_t)fixed);
    for (int d = 0; d < fixed; ++d) {
      row.coverage[(std::size_t)d] = median(cov[(std::size_t)d]);
    }
    row.lognorm_variance_T = median(var_t);
    row.lognorm_variance_V = median(var_v);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hcop
