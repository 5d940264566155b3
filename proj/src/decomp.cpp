#include "hcop/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hcop/errors.hpp"

namespace hcop {

namespace {

// T and the compression of U for the requested variant; with zero_g the
// perturbation <., g> h is absent, so the operator is U itself.
MatrixXcd effective_T(const GalerkinModel& model, bool zero_g) {
  return zero_g ? model.U_proj : model.T_mat;
}

}  // namespace

Splitting lemma_te_split(const GalerkinModel& model, bool zero_g,
                         double h_residual_threshold) {
  Splitting s;
  s.g_zeroed = zero_g;
  s.includes_h = model.includes_h;
  s.T = effective_T(model, zero_g);
  if (zero_g) {
    // S = 0: the operator is the compression of U.  With the generators
    // closed under U this is unitary outright, so V = T and R = 0.
    s.V = s.T;
    s.R = MatrixXcd::Zero(s.T.rows(), s.T.cols());
    s.branch = "unitary";
    return s;
  }
  try {
    const Hyperplanes hp = hyperplanes(model, h_residual_threshold);
    const MatrixXcd I = MatrixXcd::Identity(model.rank, model.rank);
    // V agrees with U on X_m = {sum c_j = 0} (where U keeps the span without
    // touching h) and maps the unit normal x to the unit normal y of Y_m.
    s.V = model.U_proj * (I - hp.x * hp.x.adjoint()) + hp.y * hp.x.adjoint();
    s.R = s.T - s.V;
    s.branch = "te";
  } catch (const HyperplaneDegenerate&) {
    // h inside the span: U|_K is already an endomorphism, split off S alone.
    s.V = model.U_proj;
    s.R = s.T - s.V;
    s.branch = "unitary";
  }
  return s;
}

Splitting contraction_split(const GalerkinModel& model, bool zero_g) {
  Splitting s;
  s.g_zeroed = zero_g;
  s.includes_h = model.includes_h;
  s.T = effective_T(model, zero_g);
  s.V = model.U_proj;  // compression of a unitary: a contraction
  s.R = s.T - s.V;
  s.branch = "contraction";
  return s;
}

SplitAudit audit_splitting(const Splitting& s, const GalerkinModel& model) {
  SplitAudit a;
  a.branch = s.branch;
  const Eigen::Index n = s.T.rows();
  const MatrixXcd I = MatrixXcd::Identity(n, n);

  a.unitarity_defect = (s.V.adjoint() * s.V - I).norm();
  Eigen::JacobiSVD<MatrixXcd> sv(s.V);
  a.norm_V = sv.singularValues()(0);

  Eigen::JacobiSVD<MatrixXcd> sr(s.R);
  a.singvals_R.assign(sr.singularValues().data(),
                      sr.singularValues().data() + n);
  const int allowed_rank = s.branch == "te" ? 2 : 1;
  if (n > allowed_rank && a.singvals_R[0] > 0.0) {
    a.rank_excess = a.singvals_R[(std::size_t)allowed_rank] / a.singvals_R[0];
  }

  a.resum = (s.T - (s.V + s.R)).norm();

  if (s.branch == "te") {
    // A = U|_K - V must be rank <= 1.
    Eigen::JacobiSVD<MatrixXcd> sa(model.U_proj - s.V);
    if (n > 1 && sa.singularValues()(0) > 0.0) {
      a.rank_excess_A = sa.singularValues()(1) / sa.singularValues()(0);
    }
  }

  Eigen::ComplexEigenSolver<MatrixXcd> ev(s.V);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.spec_V_defect =
        std::max(a.spec_V_defect, std::abs(std::abs(ev.eigenvalues()(i)) - 1.0));
  }

  // The spectrum of T equals the eigenvalue parameters only for the pure
  // h_lambda model with the perturbation present.
  a.spec_T_checked = !s.includes_h && !s.g_zeroed;
  if (a.spec_T_checked) {
    Eigen::ComplexEigenSolver<MatrixXcd> et(s.T);
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < model.m(); ++j) {
        best = std::min(best,
                        std::abs(et.eigenvalues()(i) - model.lambda_points(j)));
      }
      a.spec_T_defect = std::max(a.spec_T_defect, best);
    }
  }

  // Unitarity is a guarantee of the "te" construction only: in the fallback
  // branches V is the compression of a unitary, which is a contraction but is
  // exactly unitary only when the generators span a U-invariant subspace (the
  // paper's h-in-K hypothesis, unreachable exactly at finite rank).
  if (s.branch == "te" && a.unitarity_defect > 1e-8) {
    throw AuditFailure("splitting audit: V fails unitarity: ||V^H V - I|| = " +
                       std::to_string(a.unitarity_defect));
  }
  if (s.branch != "te" && a.norm_V > 1.0 + 1e-10) {
    throw AuditFailure("splitting audit: contraction bound violated: ||V|| = " +
                       std::to_string(a.norm_V));
  }
  if (a.rank_excess_A > 1e-8) {
    throw AuditFailure(
        "splitting audit: U|_K - V exceeds rank 1: relative sigma_2 = " +
        std::to_string(a.rank_excess_A));
  }
  if (a.rank_excess > 1e-8) {
    throw AuditFailure("splitting audit: R exceeds rank " +
                       std::to_string(allowed_rank) + ": relative sigma_" +
                       std::to_string(allowed_rank + 1) + " = " +
                       std::to_string(a.rank_excess));
  }
  if (a.resum > 1e-12 * std::max(1.0, s.T.norm())) {
    throw AuditFailure("splitting audit: T != V + R: defect " +
                       std::to_string(a.resum));
  }
  if (s.branch == "te" && a.spec_V_defect > 1e-8) {
    throw AuditFailure("splitting audit: spectrum of V not unimodular: " +
                       std::to_string(a.spec_V_defect));
  }
  if (a.spec_T_checked && a.spec_T_defect > 1e-8) {
    throw AuditFailure(
        "splitting audit: spectrum of T strays from the eigenvalue "
        "parameters: " +
        std::to_string(a.spec_T_defect));
  }
  return a;
}

nlohmann::json audit_to_json(const SplitAudit& a) {
  nlohmann::json j;
  j["branch"] = a.branch;
  j["unitarity_defect"] = a.unitarity_defect;
  j["norm_A"] = a.norm_V;
  j["singvals_R"] = a.singvals_R;
  j["rank_excess"] = a.rank_excess;
  j["rank_excess_A"] = a.rank_excess_A;
  j["resum_defect"] = a.resum;
  j["spec_V_defect"] = a.spec_V_defect;
  j["spec_T_checked"] = a.spec_T_checked;
  j["spec_T_defect"] = a.spec_T_defect;
  return j;
}

}  // namespace hcop
