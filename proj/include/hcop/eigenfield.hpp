#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hcop/cantor.hpp"
#include "hcop/lacunary.hpp"

namespace hcop {

// ---------------------------------------------------------------------------
// The concrete functions g, g1, h, psi built on top of a Cantor tree
// ---------------------------------------------------------------------------

/// Point evaluation of the constructed functions with error bars.  The bars
/// combine the tree's distance bracket, the lacunary truncation tail and a
/// rounding allowance.  When `on_K` is set the point lies inside (or on the
/// boundary of) a deepest-level interval: g and g1 are singular there and are
/// not evaluable; h is reported as 0 with `h_bar` the proven bound
/// |psi(w)| * (upper dist bound)^{1/3}.
struct FieldValues {
  cplx psi;
  double psi_bar = 0.0;
  cplx h;
  double h_bar = 0.0;
  cplx g, g1;
  double g_bar = 0.0, g1_bar = 0.0;
  DistBracket dist;
  bool on_K = false;
};

/// g(w) = -i w^{-1} dist(w,K)^{-1/3},  g1(w) = w g(w),  h(w) = psi(w) dist^{1/3},
/// h_lambda(w) = h(w)/(lambda - w).
///
/// Two evaluation grades coexist:
///  * full-precision psi through the exact binary-angle series (N terms), used
///    for analytic identities and pointwise checks;
///  * a short truncation (quad_terms terms, default 2) used inside L2
///    quadratures, where the highest retained frequency 2^{9*quad_terms} must
///    be resolvable by the mesh.  The dropped tail enters the certified bars.
class FunctionField {
 public:
  FunctionField(const CantorTree& tree, LacunarySeries series, int quad_terms = 2);

  const CantorTree& tree() const { return *tree_; }
  const LacunarySeries& series() const { return series_; }
  int quad_terms() const { return quad_terms_; }

  /// sum_{n > quad_terms} a^{1-n}: bound for |gamma - gamma_trunc|.
  double quad_tail() const;
  /// Lipschitz bound for the truncated psi with respect to position in turns.
  double psi_lipschitz_turns() const;

  /// Full-precision evaluation (psi with all N series terms).
  FieldValues eval(const BinaryAngle& w) const;
  /// g with a hard failure on points of K where it is singular.
  cplx g_at(const BinaryAngle& w) const;

  /// Phases frac(2^{9n} base), n = 1..quad_terms, for fast truncated psi.
  std::array<double, 8> phases(const BinaryAngle& base) const;
  /// Truncated psi at base + offset (offset in turns), given phases(base).
  double psi_quad(const std::array<double, 8>& base_phases, double offset) const;
  /// Truncated psi at an exact angle.
  double psi_quad_at(const BinaryAngle& w) const;

 private:
  const CantorTree* tree_;
  LacunarySeries series_;
  int quad_terms_;
};

// ---------------------------------------------------------------------------
// Graded circle mesh over the complement of the deepest-level intervals
// ---------------------------------------------------------------------------

/// One quadrature node.  `endpoint` indexes GapMesh::endpoints; `offset` is
/// the signed distance in turns from that endpoint into the gap (positive =
/// forward).  Offsets are kept relative so that kernels 1/(lambda - w) can be
/// evaluated stably arbitrarily close to the singular set.
struct MeshNode {
  std::int32_t endpoint;
  double offset;
  double weight;  // turns; node weights sum to the meshed measure
  double psi;     // truncated psi at the node
};

/// Graded mesh: every complementary gap is halved, each half subdivided into
/// dyadic cells accumulating at the gap endpoint (ratio 1/2, `levels` levels),
/// and any cell longer than `cell_cap` is split uniformly; 12-point
/// Gauss-Legendre nodes per cell.  The innermost dyadic sliver of each half is
/// omitted; its measure is accumulated in `omitted_measure`.
struct GapMesh {
  std::vector<BinaryAngle> endpoints;       // gap endpoints (points of K)
  std::vector<std::array<double, 8>> endpoint_phases;
  std::vector<cplx> endpoint_point;
  std::vector<MeshNode> nodes;
  double cell_cap = 0.0;
  int levels = 0;
  double omitted_measure = 0.0;  // turns (dyadic slivers; K itself is null here)

  std::size_t size() const { return nodes.size(); }
  /// Chordal distance of node i to K (exact inside a gap).
  double node_dist(std::size_t i) const;
};

/// Largest cell (in turns) for which the 12-point rule resolves frequency
/// 2^{9*quad_terms} to near machine precision.
double default_cell_cap(const FunctionField& f);

GapMesh build_gap_mesh(const FunctionField& f, double cell_cap, int levels = 40);

/// Signed turn offsets (-1/2, 1/2] from lambda to each mesh endpoint.
std::vector<double> endpoint_deltas(const GapMesh& mesh, const BinaryAngle& lambda);

/// Exclusion radius (chordal) used by windowed L2 quadratures: 1/depth!.
double exclusion_radius(int depth);

// ---------------------------------------------------------------------------
// Identity verification (inner products with g and g1)
// ---------------------------------------------------------------------------

struct IdentityRecord {
  std::string id;  // "h_lambda_g", "h_lambda_g1", "h_g1"
  cplx lambda;
  cplx target;
  cplx analytic;
  double analytic_bar = 0.0;
  double analytic_residual = 0.0;
  cplx direct;
  double direct_bar = 0.0;
  double direct_residual = 0.0;
};

/// Both verification paths for <h_lambda, g> = 1, <h_lambda, g1> = lambda^{-1}
/// and <h, g1> = 0.
///   analytic: the reduction to the conjugate series, i*gamma(lambda^{-1})
///     (resp. i*lambda^{-1}*gamma(lambda^{-1}), i*<psi, 1> = 0 at coefficient
///     level), evaluated with the full series;
///   direct: graded-mesh quadrature of the singular integrand with the dist
///     factors evaluated at every node.  The value psi(lambda) is subtracted
///     nodewise and re-added through the exact principal values
///     int w/(lambda-w) dmu = -1/2 and int 1/(lambda-w) dmu = 1/(2 lambda),
///     which keeps the quadrature integrand bounded.  The direct bar combines
///     the coarse/fine mesh difference, the truncation tail and the omitted
///     sliver mass.
class IdentityVerifier {
 public:
  /// Throws AccuracyUnattainable when cell_cap cannot resolve the truncated
  /// psi frequency.
  IdentityVerifier(const FunctionField& f, double cell_cap, int levels = 40);
  explicit IdentityVerifier(const FunctionField& f)
      : IdentityVerifier(f, default_cell_cap(f)) {}

  std::array<IdentityRecord, 3> verify(const BinaryAngle& lambda) const;

  const GapMesh& mesh() const { return mesh_; }

 private:
  const FunctionField* field_;
  GapMesh mesh_;         // working mesh
  GapMesh mesh_coarse_;  // doubled cell cap, for the quadrature error estimate
  cplx h_g1_fine_, h_g1_coarse_;
};

// ---------------------------------------------------------------------------
// Pointwise and L2 checks
// ---------------------------------------------------------------------------

/// Max relative residual over the samples of the two algebraic identities
///   w h_lambda(w) = lambda h_lambda(w) - h(w)
///   w^{-1} h_lambda(w) = lambda^{-1} h_lambda(w) + lambda^{-1} w^{-1} h(w)
/// for any complex lambda (not necessarily unimodular).
double verify_uhl(const FunctionField& f, cplx lambda,
                  const std::vector<BinaryAngle>& samples);

/// ||h||_{L2} over the meshed gaps (no window; h is bounded).
double norm_h(const FunctionField& f, const GapMesh& mesh);

/// Windowed ||h_lambda||^2: nodes with |w - lambda| below the exclusion
/// radius are skipped.
double norm2_h_lambda(const FunctionField& f, const GapMesh& mesh,
                      const BinaryAngle& lambda);

/// Windowed ||h_z - h_s||^2 for z, s in K.
double norm2_pair_diff(const FunctionField& f, const GapMesh& mesh,
                       const BinaryAngle& z, const BinaryAngle& s);

struct ContinuityRow {
  BinaryAngle z, s;
  int octave = 0;      // 0 = widest separation
  double sep = 0.0;    // chordal |z - s|
  double norm2 = 0.0;  // ||h_z - h_s||^2
  double ratio = 0.0;  // norm2 / sep^{1/3}
};

/// Same-tail endpoint pairs: z and s are corresponding deepest-level endpoints
/// whose angles differ by exactly delta_cells/512 turns, with delta_cells
/// halving from 2^{octaves-1} down to 1.
std::vector<std::pair<BinaryAngle, BinaryAngle>> octave_pairs(
    const CantorTree& tree, int octaves = 5, int per_octave = 8);

std::vector<ContinuityRow> continuity_modulus(
    const FunctionField& f, const GapMesh& mesh,
    const std::vector<std::pair<BinaryAngle, BinaryAngle>>& pairs);

/// Independent measurements of the eigen-identity residual:
///   lhs = ||T h_lambda - lambda h_lambda|| / ||h||   (pointwise assembly,
///         T = U + <.,g> h, common exclusion window),
///   rhs = |<h_lambda, g> - 1|  (the direct-path inner product).
struct EigenIdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_gap = 0.0;  // |lhs - rhs| / max(rhs, eps)
  cplx inner_h_lambda_g;
};

EigenIdentityCheck eigen_identity_check(const FunctionField& f,
                                        const GapMesh& mesh,
                                        const BinaryAngle& lambda);

}  // namespace hcop
