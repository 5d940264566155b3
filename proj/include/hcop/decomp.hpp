#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hcop/galerkin.hpp"

namespace hcop {

/// A decomposition T = V + R of the model operator, in frame coordinates.
///
/// Branches:
///   "te"          V unitary, rank(R) <= 2: V agrees with U on the invariance
///                 hyperplane X_m and sends its unit normal x to the unit
///                 normal y of Y_m; R = (U|_K - V) + S.
///   "unitary"     h lies in the span: U maps the span to itself, V = U|_K is
///                 unitary outright and R = S|_K has rank <= 1.
///   "contraction" V = PU|_K (a contraction, not unitary), R = S-part with
///                 rank <= 1.
struct Splitting {
  MatrixXcd T;  // the operator that was split
  MatrixXcd V;
  MatrixXcd R;
  std::string branch;
  bool g_zeroed = false;   // test hook: <., g> forced to 0, so T = U and R = 0
  bool includes_h = false; // model had h appended to the generators
};

/// Unitary + rank<=2 splitting.  Falls back to the "unitary" branch when the
/// hyperplane construction is degenerate (h inside the span).  `zero_g`
/// replaces the <., g> functional by 0 (then S = 0, T = U, V = T, R = 0).
Splitting lemma_te_split(const GalerkinModel& model, bool zero_g = false,
                         double h_residual_threshold = 1e-6);

/// Contraction + rank<=1 splitting: V = PU|_K, R = T - V.
Splitting contraction_split(const GalerkinModel& model, bool zero_g = false);

/// Diagnostics recomputed from scratch off a stored splitting.
struct SplitAudit {
  std::string branch;
  double unitarity_defect = 0.0;       // ||V^H V - I||_F
  double norm_V = 0.0;                 // operator norm of V
  std::vector<double> singvals_R;      // descending
  double rank_excess = 0.0;            // sigma_{k+1}/sigma_1 past the allowed rank
  double rank_excess_A = 0.0;          // sigma_2/sigma_1 of A = U|_K - V ("te")
  double resum = 0.0;                  // ||T - (V + R)||_F
  double spec_V_defect = 0.0;          // max | |eig V| - 1 |   (unitary branches)
  double spec_T_defect = 0.0;          // max dist(eig T, {lambda_j}), if applicable
  bool spec_T_checked = false;
};

/// Recomputes every diagnostic and enforces the structural guarantees
/// (unitarity or contraction bound, rank of R, spectra, exact resummation).
/// Throws AuditFailure naming the first violated guarantee.
SplitAudit audit_splitting(const Splitting& s, const GalerkinModel& model);

nlohmann::json audit_to_json(const SplitAudit& a);

}  // namespace hcop
