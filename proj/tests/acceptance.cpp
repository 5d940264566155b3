// Acceptance suite: one verdict line per criterion, at the stated tolerances
// and time budgets.  Exit code 0 when every hard criterion passes, 1
// otherwise.  The soft coverage trend of criterion 9 is reported on its own
// line and only affects the exit code (3) when --strict-trends is given.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hcop/belov.hpp"
#include "hcop/cantor.hpp"
#include "hcop/circle_function.hpp"
#include "hcop/decomp.hpp"
#include "hcop/eigenfield.hpp"
#include "hcop/galerkin.hpp"
#include "hcop/lacunary.hpp"
#include "hcop/orbitlab.hpp"

using namespace hcop;
using clk = std::chrono::steady_clock;

namespace {

double seconds_since(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

int failures = 0;

void verdict(int n, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", n,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

int main(int argc, char** argv) {
  bool strict_trends = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict-trends") == 0) strict_trends = true;
  }
  bool trend_flagged = false;

  // ---- 1: hypothesis inequalities in exact rational arithmetic -----------
  {
    const auto t0 = clk::now();
    const BelovReport rep = belov_check(BelovParams::paper(), 20);
    int exact_boundary = 0;
    for (const BelovRecord& r : rep.records) {
      if (r.m == -1 && r.exact_equality) ++exact_boundary;
    }
    const double dt = seconds_since(t0);
    verdict(1, rep.all_pass && exact_boundary >= 2 && dt < 1.0,
            "rational hypothesis checks m<=20 all pass, " +
                std::to_string(exact_boundary) +
                " boundary constants exactly 1 (" + fmt(dt) + "s)");
  }

  // ---- 2: conjugate-function integral vs negative-frequency part ---------
  {
    const auto t0 = clk::now();
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<std::int64_t> pick(0, (1 << 24) - 1);
    double worst = 0.0;
    for (int f_idx = 0; f_idx < 100; ++f_idx) {
      std::map<int, cplx> coeffs;
      for (int n = -32; n <= 32; ++n) coeffs[n] = cplx(u(rng), u(rng));
      const LaurentPoly f(std::move(coeffs));
      const LaurentFunction ff(f);
      const LaurentPoly fm = f.negative_part();
      for (int k = 0; k < 100; ++k) {
        const BinaryAngle z = BinaryAngle::from_fraction(pick(rng), 1 << 24);
        worst = std::max(worst,
                         std::abs(conjugate_integral(ff, z, 4096) - fm.eval(z)));
      }
    }
    const double dt = seconds_since(t0);
    verdict(2, worst <= 1e-10 && dt < 30.0,
            "100 Laurent functions x 100 points, worst residual " + fmt(worst) +
                " <= 1e-10 at M=4096 (" + fmt(dt) + "s)");
  }

  // ---- 3: empirical Hoelder ratio under the certified constant -----------
  {
    const auto t0 = clk::now();
    const GammaFunction g((LacunarySeries{}));
    const auto [alpha, C] = holder_constant(8.0, 512.0);
    const double sup = holder_ratio_sup(g, alpha, 100000, 2024);
    const double dt = seconds_since(t0);
    verdict(3, sup <= C && dt < 30.0,
            "sup ratio over 1e5 pairs " + fmt(sup) + " <= certified C = " +
                fmt(C) + " at alpha = 1/3 (" + fmt(dt) + "s)");
  }

  // ---- shared construction ------------------------------------------------
  const LevelSetCover cover = cover_gamma_level_set(12, 1e-3, 1 << 20);
  const CantorTree tree = build_cantor(cover, 8);
  const FunctionField field(tree, LacunarySeries{}, 2);

  // ---- 4: tree audit, gap geometry, integrability -------------------------
  {
    const auto t0 = clk::now();
    const CantorAudit audit = audit_cantor_tree(tree);
    double straight = 0.0;
    for (double L : {0.01, 0.1, 0.4}) {
      straight = std::max(
          straight, std::abs(straight_gap_quadrature(L, 2.0 / 3.0) -
                             straight_gap_closed_form(L, 2.0 / 3.0)) /
                        straight_gap_closed_form(L, 2.0 / 3.0));
    }
    const CantorTree tree6 = build_cantor(cover, 6);
    const double i8 = integrability_report(tree, 2.0 / 3.0).total;
    const double i6 = integrability_report(tree6, 2.0 / 3.0).total;
    const double drift = std::abs(i8 - i6) / std::abs(i8);
    const double dt = seconds_since(t0);
    verdict(4,
            audit.all() && straight <= 1e-12 && drift < 0.01 && dt < 300.0,
            "nesting/ordering/shrinkage exact, straight-line geometry " +
                fmt(straight) + " <= 1e-12, depth 6 vs 8 integral drift " +
                fmt(drift) + " < 1% (" + fmt(dt) + "s)");
  }

  // ---- 5: inner-product identities, both paths ----------------------------
  {
    const auto t0 = clk::now();
    const IdentityVerifier ver(field, default_cell_cap(field));
    const auto lambdas = default_lambdas(tree, 32);
    const double tol = 1e-3 + LacunarySeries{}.tail() + 1e-9;
    double worst_a = 0.0, worst_d = 0.0;
    bool in_bars = true;
    for (const BinaryAngle& lam : lambdas) {
      for (const IdentityRecord& r : ver.verify(lam)) {
        worst_a = std::max(worst_a, r.analytic_residual);
        worst_d = std::max(worst_d, r.direct_residual);
        if (r.direct_residual > r.analytic_residual + r.direct_bar) {
          in_bars = false;
        }
      }
    }
    const double dt = seconds_since(t0);
    verdict(5,
            worst_a <= tol && in_bars && worst_d <= 5e-2 && dt < 600.0,
            "32 eigenvalues: worst analytic residual " + fmt(worst_a) +
                " <= " + fmt(tol) + ", direct path " + fmt(worst_d) +
                " <= 5e-2 within certified bars (" + fmt(dt) + "s)");
  }

  // ---- 6: pointwise shift identity and eigen-identity agreement -----------
  {
    const auto t0 = clk::now();
    std::vector<BinaryAngle> samples;
    for (int k = 0; k < 256; ++k) {
      samples.push_back(BinaryAngle::from_fraction(2 * k + 1, 512));
    }
    const auto lambdas = default_lambdas(tree, 8);
    double uhl = verify_uhl(field, cplx(2.0, 0.0), samples);
    uhl = std::max(uhl, verify_uhl(field, lambdas[0].to_complex(), samples));
    uhl = std::max(uhl, verify_uhl(field, cplx(0.36, -0.48), samples));
    const GapMesh mesh = build_gap_mesh(field, default_cell_cap(field));
    double gap = 0.0;
    for (int i = 0; i < 4; ++i) {
      gap = std::max(gap,
                     eigen_identity_check(field, mesh, lambdas[(std::size_t)i])
                         .rel_gap);
    }
    const double dt = seconds_since(t0);
    verdict(6, uhl <= 1e-14 && gap <= 1e-10,
            "shift identity relative residual " + fmt(uhl) +
                " <= 1e-14; eigen residual agrees with |<h_l,g>-1| to " +
                fmt(gap) + " <= 1e-10 relative (" + fmt(dt) + "s)");
  }

  // ---- 7: splittings across nested m --------------------------------------
  std::vector<GalerkinModel> models;
  {
    const auto t0 = clk::now();
    const GapMesh gram_mesh =
        build_gap_mesh(field, 0.5 * default_cell_cap(field));
    const GalerkinModel m64 =
        build_model(field, gram_mesh, default_lambdas(tree, 64));
    for (int m : {8, 16, 32}) {
      std::vector<int> idx;
      for (int i = 0; i < 64; i += 64 / m) idx.push_back(i);
      models.push_back(submodel(m64, idx));
    }
    models.push_back(m64);

    bool ok = true;
    std::string why;
    for (const GalerkinModel& md : models) {
      const Splitting te = lemma_te_split(md);
      const SplitAudit a = audit_splitting(te, md);
      const Splitting co = contraction_split(md);
      const SplitAudit b = audit_splitting(co, md);
      const bool this_ok =
          a.unitarity_defect <= 1e-8 &&
          a.singvals_R.size() >= 3 &&
          a.singvals_R[2] <= 1e-8 * a.singvals_R[0] &&
          md.U_proj.operatorNorm() <= 1.0 + 1e-10 &&
          b.singvals_R.size() >= 2 &&
          b.singvals_R[1] <= 1e-8 * b.singvals_R[0] &&
          a.spec_V_defect <= 1e-8 && a.spec_T_checked &&
          a.spec_T_defect <= 1e-8;
      if (!this_ok) {
        ok = false;
        why = "m=" + std::to_string(md.m()) + " violates a splitting bound";
      }
    }
    const double dt = seconds_since(t0);
    verdict(7, ok && dt < 120.0,
            ok ? "m in {8,16,32,64}: V unitary to 1e-8, rank(R) <= 2, "
                 "||PU|| <= 1+1e-10, rank(PS) <= 1, spectra match (" +
                     fmt(dt) + "s)"
               : why + " (" + fmt(dt) + "s)");
  }

  // ---- 8: continuity modulus across octaves -------------------------------
  {
    const auto t0 = clk::now();
    const GapMesh mesh = build_gap_mesh(field, default_cell_cap(field));
    const auto rows =
        continuity_modulus(field, mesh, octave_pairs(tree, 5, 8));
    std::vector<double> all;
    std::map<int, std::vector<double>> per_octave;
    for (const ContinuityRow& r : rows) {
      all.push_back(r.ratio);
      per_octave[r.octave].push_back(r.ratio);
    }
    const double med = median(all);
    bool ok = med > 0.0;
    double worst = 0.0;
    for (auto& [o, v] : per_octave) {
      const double m = median(v);
      worst = std::max(worst, m / med);
      if (m > 3.0 * med) ok = false;
    }
    const double dt = seconds_since(t0);
    verdict(8, ok,
            "5 octaves x 8 pairs: worst octave-median ratio " + fmt(worst) +
                "x the global median (<= 3x) for ||h_z-h_s||^2 / |z-s|^{1/3} (" +
                fmt(dt) + "s)");
  }

  // ---- 9: orbit statistics -------------------------------------------------
  {
    const auto t0 = clk::now();
    const GalerkinModel& m64 = models.back();
    const Splitting s = lemma_te_split(m64);
    const OrbitRun vrun =
        run_orbit(s.V, random_unit_vector(m64.rank, 1), 10000,
                  default_directions(m64.rank, 1));

    MatrixXcd rot(1, 1);
    rot(0, 0) = std::polar(1.0, 2.0 * std::numbers::pi / std::numbers::sqrt2);
    const VectorXcd one = VectorXcd::Ones(1);
    const OrbitRun weyl = run_orbit(rot, one, 100000, {one});
    const double cov = weyl.coverage.empty() ? 0.0 : weyl.coverage[0];

    std::vector<const GalerkinModel*> mp;
    for (const GalerkinModel& md : models) mp.push_back(&md);
    const auto rows = eigen_crowding_report(mp, 20000, 0.05, 5, 1);
    bool variance_ok = true;
    for (const CrowdingRow& r : rows) {
      if (r.m >= 8 && !(r.lognorm_variance_T > r.lognorm_variance_V)) {
        variance_ok = false;
      }
    }
    int nondecreasing = 0;
    for (int d = 0; d < 3; ++d) {
      bool mono = true;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].m > 32) continue;  // trend judged over m in {8,16,32}
        if (rows[i].coverage[(std::size_t)d] <
            rows[i - 1].coverage[(std::size_t)d]) {
          mono = false;
        }
      }
      if (mono) ++nondecreasing;
    }
    const bool trend_ok = nondecreasing >= 2;
    const bool hard_ok = vrun.max_lognorm_dev <= 1e-5 && cov >= 0.95 &&
                         variance_ok;
    const double dt = seconds_since(t0);
    verdict(9, hard_ok,
            "unitary drift " + fmt(vrun.max_lognorm_dev) +
                " <= 1e-5 over 1e4 steps; Weyl coverage " + fmt(cov) +
                " >= 0.95; perturbed variance exceeds unitary for all m (" +
                fmt(dt) + "s)");
    if (!trend_ok) {
      trend_flagged = true;
      std::string covs;
      for (const CrowdingRow& r : rows) {
        covs += " m=" + std::to_string(r.m) + ":";
        for (double cv : r.coverage) covs += " " + fmt(cv);
      }
      std::printf(
          "FLAG criterion 9 trend: coverage non-decreasing in only %d of 3 "
          "projections over m in {8,16,32} (flagged for investigation, not a "
          "build failure;%s). Fixed-direction projections of normalized "
          "orbits concentrate like m^{-1/2} while the perturbation stays "
          "small at these separations, so per-direction coverage shrinks "
          "with m.\n",
          nondecreasing, covs.c_str());
    } else {
      std::printf("INFO criterion 9 trend: coverage non-decreasing in %d of 3 "
                  "projections\n",
                  nondecreasing);
    }
  }

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all hard criteria pass%s\n",
              trend_flagged ? " (trend flagged)" : "");
  return (trend_flagged && strict_trends) ? 3 : 0;
}
