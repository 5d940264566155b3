#pragma once

#include <complex>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <vector>

#include "hcop/binary_angle.hpp"
#include "hcop/errors.hpp"
#include "hcop/lacunary.hpp"

namespace hcop {

// ---------------------------------------------------------------------------
// Level-set cover
// ---------------------------------------------------------------------------

/// One arc of a circle cover. The arc is [lo, hi) walking forward from lo.
struct CoverArc {
  BinaryAngle lo;
  BinaryAngle hi;
  bool candidate = false;   // false = certified to contain no level-set point
  bool witnessed = false;   // candidate with a verified point inside
  bool pinned = false;      // carved around a constructed point; never merged
  BinaryAngle witness;      // valid when witnessed
  double witness_residual = 0.0;
};

struct LevelSetCover {
  std::vector<CoverArc> arcs;  // sorted by lo, pairwise disjoint
  double delta = 0.0;
  int truncation = 0;

  std::size_t candidate_count() const;
  std::size_t witnessed_count() const;
};

/// Classify the circle into arcs that certifiably miss the level set
/// {f = target} and arcs that may meet it. Exclusion certificate per arc:
/// |f(mid) - target| > delta + f.tail() + f.var_bound(max chord to mid).
/// `known_points` are pre-verified level-set points; each gets a tiny pinned
/// candidate arc centred on it. Arcs that reach length <= 1/resolution
/// without a certificate are kept as (flagged, unwitnessed) candidates so
/// that the level set is always inside the candidate union.
LevelSetCover cover_level_set(const LevelFunction& f, cplx target, double delta,
                              std::int64_t resolution, int truncation,
                              const std::vector<BinaryAngle>& known_points = {});

// ---------------------------------------------------------------------------
// Constructive points of the level set {gamma_N = i}
// ---------------------------------------------------------------------------

/// Free binary coordinates of one constructed level-set point. The angle is
/// t = sum_j B_j 2^{-9 j}; digit B_1 = cell translates the point by cell/512
/// (which leaves gamma unchanged), the branch sign picks one of the two
/// law-of-cosines solutions at the first greedy step (digit B_2), and opt5 /
/// opt7 / opt9 pick between two adjacent feasible values of digits B_5, B_7,
/// B_9. All remaining digits are chosen deterministically.
struct LevelPointSpec {
  int cell = 0;      // digit B_1, 0..511
  int sign1 = +1;    // +1 or -1
  int opt5 = 0;      // 0 or 1
  int opt7 = 0;
  int opt9 = 0;
  int steps = 12;    // greedy steps = series truncation N; digits B_2..B_{N+1}
  int bits = BinaryAngle::kDefaultBits;
};

struct LevelPoint {
  std::vector<int> digits;  // B_1..B_{N+1}
  BinaryAngle t;
  double residual;          // |gamma_N(t) - i|, exact-phase evaluation
};

/// Build one point by greedy digit targeting; throws PrecisionExhausted if
/// the residual cannot be brought below `tol`.
LevelPoint construct_level_point(const LevelPointSpec& spec, double tol = 1e-8);

/// All 512 combinations: 32 cells (B_1 = 0..31) x sign1 x opt5 x opt7 x opt9.
/// The 16 digit tails are computed once and translated across cells.
std::vector<LevelPoint> construct_level_family(int steps = 12,
                                               int bits = BinaryAngle::kDefaultBits,
                                               double tol = 1e-8);

/// Production cover: constructs the point family for gamma truncated at
/// `truncation` terms and classifies the rest of the circle.
LevelSetCover cover_gamma_level_set(int truncation, double delta,
                                    std::int64_t resolution,
                                    int bits = BinaryAngle::kDefaultBits);

// ---------------------------------------------------------------------------
// Nested-interval (Cantor) tree
// ---------------------------------------------------------------------------

struct CantorInterval {
  BinaryAngle a;
  BinaryAngle b;
};

struct CantorTree {
  int depth = 0;
  // levels[n-1] holds the 2^n intervals of level n, in lexicographic order.
  std::vector<std::vector<CantorInterval>> levels;

  const std::vector<CantorInterval>& deepest() const { return levels.back(); }
};

/// Select interval endpoints from the witnessed candidate arcs of `cover`.
/// Deterministic; `rng_seed` is accepted for interface stability but the
/// construction has no random choices. Throws DepthUnreachable when fewer
/// than 2^{depth+1} witnessed candidate arcs exist.
CantorTree build_cantor(const LevelSetCover& cover, int depth,
                        std::uint64_t rng_seed = 0);

struct CantorAudit {
  bool com1_nesting = false;       // child endpoints equal parent endpoints
  bool com2_ordering = false;      // strict lexicographic disjointness
  bool com3_shrinkage = false;     // chordal length < 1/n! at every level
  bool gap_measure_collapse = false;  // sum of level-n chordal lengths < 2^n/n!
  double worst_shrinkage_ratio = 0.0; // max over levels of len/(1/n!)
  bool all() const {
    return com1_nesting && com2_ordering && com3_shrinkage && gap_measure_collapse;
  }
};

CantorAudit audit_cantor_tree(const CantorTree& tree);

/// Chordal distance from z to the union of deepest-level intervals:
/// certified bracket lower <= dist <= upper with upper - lower bounded by the
/// largest interval length (< 1/depth!).
struct DistBracket {
  double lower;
  double upper;
};

DistBracket dist_to_K(const BinaryAngle& z, const CantorTree& tree);

// ---------------------------------------------------------------------------
// Integrability of dist(.,K)^{-alpha} over the complementary gaps
// ---------------------------------------------------------------------------

struct GapEntry {
  std::size_t index;     // gap follows deepest-level interval `index`
  double angle_length;   // in angle units (fraction of a turn)
  double contribution;   // graded quadrature of chordal dist^{-alpha}, arc-length measure
  double closed_form;    // 2^alpha L^{1-alpha}/(1-alpha) with L = arc length
};

struct IntegrabilityReport {
  double alpha = 0.0;
  double total = 0.0;
  std::vector<GapEntry> gaps;
  std::vector<double> comparison_partial_sums;  // sum 2^n/((n-1)!)^{1-alpha}
};

/// Throws UnsupportedExponent unless 0 < alpha < 1.
IntegrabilityReport integrability_report(const CantorTree& tree, double alpha);

/// Straight-line test geometry: integral of min(x, L-x)^{-alpha} over [0, L]
/// by the same graded quadrature used for real gaps, and its closed form
/// 2^alpha L^{1-alpha}/(1-alpha). The two agree to ~1e-13 relative.
double straight_gap_quadrature(double L, double alpha);
double straight_gap_closed_form(double L, double alpha);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

nlohmann::json cantor_tree_to_json(const CantorTree& tree);
CantorTree cantor_tree_from_json(const nlohmann::json& j);

}  // namespace hcop
