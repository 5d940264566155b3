#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hcop/galerkin.hpp"

namespace hcop {

/// Orbit statistics for x, mat x, mat^2 x, ... with renormalization
/// bookkeeping (norms tracked in log scale so non-normal iterates cannot
/// overflow).
///
/// Coverage is measured per projection direction p: the normalized iterate is
/// projected to z_n = <x_n/||x_n||, p> and the visited fraction of eps-cells
/// of the two marginal grids on [-1, 1] (Re z and Im z) is reported.  Finite
/// dimensions admit no hypercyclic operators, so coverage is a trend
/// surrogate, never a density claim.
struct OrbitRun {
  int steps = 0;
  std::vector<double> lognorms;        // log ||mat^n x0||, n = 0..steps
  double max_lognorm_dev = 0.0;        // max_n |lognorm_n - lognorm_0|
  double lognorm_variance = 0.0;       // variance of the lognorm sequence
  std::vector<double> coverage;        // per projection direction
  std::vector<int> visited_cells;      // per projection direction
  int cells_per_direction = 0;
};

struct OrbitOptions {
  double eps = 0.05;      // grid spacing of the coverage cells
  int renorm_every = 64;  // renormalization cadence
};

/// Optional per-step sink: (step, lognorm, projected coordinates).
using OrbitSink =
    std::function<void(int, double, const std::vector<cplx>&)>;

OrbitRun run_orbit(const MatrixXcd& mat, const VectorXcd& x0, int n_steps,
                   const std::vector<VectorXcd>& directions,
                   const OrbitOptions& opts = {},
                   const OrbitSink& sink = nullptr);

/// Default projection directions: the first min(3, dim) frame axes (frame
/// coordinates make the frame vectors the coordinate axes) plus one seeded
/// random direction.
std::vector<VectorXcd> default_directions(int dim, std::uint64_t seed);

/// Seeded random unit vector (complex Gaussian, normalized).
VectorXcd random_unit_vector(int dim, std::uint64_t seed);

/// Largest residual of any frame vector of K_m against span{h_lambda : j in
/// subset}; 0 when the subset spans everything.
double span_residual(const GalerkinModel& model,
                     const std::vector<int>& subset);

/// Median over `trials` random subsets of the given fraction of the lambda
/// set of span_residual; small values support the density mechanism of the
/// eigenvector-field at finite m.
double density_surrogate(const GalerkinModel& model, double subset_fraction,
                         std::uint64_t rng_seed, int trials = 5);

/// Per-m diagnostics over nested models: gram conditioning, eigenvalue
/// crowding, and orbit coverage of T at a fixed budget (median over seeds,
/// per fixed frame direction).
struct CrowdingRow {
  int m = 0;
  double condition = 1.0;
  double min_separation = 0.0;          // min pairwise chordal lambda distance
  std::vector<double> coverage;         // per fixed direction, median of seeds
  double lognorm_variance_T = 0.0;      // median over seeds
  double lognorm_variance_V = 0.0;      // median over seeds, V from decomp
};

std::vector<CrowdingRow> eigen_crowding_report(
    const std::vector<const GalerkinModel*>& models, int steps,
    double eps = 0.05, int n_seeds = 5, std::uint64_t seed0 = 1);

}  // namespace hcop
