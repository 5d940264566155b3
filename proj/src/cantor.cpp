#include "hcop/cantor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "hcop/errors.hpp"

namespace hcop {
namespace {

constexpr int kDigitBits = 9;
constexpr int kDigitBase = 1 << kDigitBits;  // 512
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double centered_frac(double x) { return x - std::round(x); }

int mod_base(long v) {
  long m = v % kDigitBase;
  return static_cast<int>(m < 0 ? m + kDigitBase : m);
}

// Residual magnitude after step k if digit B_{k+1} were v and all later
// digits zero: exact phases of the truncated angle. d holds B_1..B_{N+1}
// with entries beyond index k meaningless; phase of term j uses digits
// d[j+1..k] plus the candidate v at position k+1.
double scan_residual(const std::vector<int>& d, int k, int v,
                     std::complex<double>* out_r = nullptr,
                     double* out_phi_k = nullptr) {
  std::complex<double> r(0.0, 1.0);
  double a_j = 1.0;
  for (int j = 1; j <= k; ++j) {
    double ph = 0.0;
    double scale = 1.0;
    for (int m = j + 1; m <= k; ++m) {
      scale /= kDigitBase;
      ph += d[m] * scale;
    }
    ph += v * scale / kDigitBase;
    if (j == k && out_phi_k) *out_phi_k = ph;
    r -= a_j * std::polar(1.0, kTwoPi * ph);
    a_j /= 8.0;
  }
  if (out_r) *out_r = r;
  return std::abs(r);
}

double step_target(int k, int N) { return (k == N) ? 0.0 : std::pow(8.0, -k); }

// Best deviation |F - tau| achievable at step k over all digits.
double best_step_dev(const std::vector<int>& d, int k, int N) {
  const double tau = step_target(k, N);
  double best = 1e300;
  for (int v = 0; v < kDigitBase; ++v) {
    best = std::min(best, std::abs(scan_residual(d, k, v) - tau));
  }
  return best;
}

// How well step k+1 can re-aim if digit B_{k+1} is set to v. The digit also
// drifts the larger, already-placed terms, which a same-step score cannot
// see; this one-step lookahead keeps the running residual inside the
// annulus the remaining coefficients can cancel.
double lookahead_dev(std::vector<int>& d, int k, int N, int v) {
  if (k >= N) return 0.0;
  d[k + 1] = v;
  double dev = best_step_dev(d, k + 1, N);
  d[k + 1] = 0;
  return dev;
}

// Choose digit B_{k+1} at step k. For k == 1 the two law-of-cosines branches
// appear as two clusters of good digits on either side of arg(residual);
// `sign1` picks the cluster. Steps 4/6/8 return a pinned pair of adjacent
// feasible digits; `opt` picks the member. "Best" = smallest deviation from
// the next coefficient, judged one step ahead.
int choose_digit(std::vector<int>& d, int k, int N, int sign1, int opt) {
  const double tau = step_target(k, N);
  std::vector<std::pair<double, int>> scored;  // (same-step deviation, digit)
  scored.reserve(kDigitBase);
  for (int v = 0; v < kDigitBase; ++v) {
    if (k == 1) {
      // branch side: sign of the phase offset of term 1 from arg(i) = 1/4.
      double side = centered_frac(static_cast<double>(v) / kDigitBase - 0.25);
      if (sign1 > 0 ? side <= 0.0 : side >= 0.0) continue;
    }
    scored.emplace_back(std::abs(scan_residual(d, k, v) - tau), v);
  }
  if (scored.empty()) throw PrecisionExhausted("no feasible digit at greedy step");
  std::sort(scored.begin(), scored.end());

  if (k == 4 || k == 6 || k == 8) {
    // Adjacent pairs around the best few digits; both members must survive
    // the lookahead, since each becomes a tree branch.
    int centre = scored.front().second;
    double best_pair_score = 1e300;
    int best_lo = centre;
    for (int b = centre - 3; b <= centre + 2; ++b) {
      double s0 = lookahead_dev(d, k, N, mod_base(b));
      double s1 = lookahead_dev(d, k, N, mod_base(b + 1));
      double s = std::max(s0, s1);
      if (s < best_pair_score) {
        best_pair_score = s;
        best_lo = b;
      }
    }
    return mod_base(best_lo + opt);
  }

  std::size_t shortlist = std::min<std::size_t>(scored.size(), k == N ? 1 : 6);
  int best = scored.front().second;
  double best_score = 1e300;
  for (std::size_t i = 0; i < shortlist; ++i) {
    double s = lookahead_dev(d, k, N, scored[i].second);
    if (s < best_score) {
      best_score = s;
      best = scored[i].second;
    }
  }
  return best;
}

BinaryAngle assemble_angle(const std::vector<int>& d, int N, int bits) {
  BigInt raw = 0;
  for (int j = 1; j <= N + 1; ++j) {
    raw += BigInt(d[j]) << (bits - kDigitBits * j);
  }
  return BinaryAngle(raw, bits);
}

double gamma_residual(const BinaryAngle& t, int N) {
  LacunarySeries s;
  s.N = N;
  auto [v, err] = s.gamma_eval(t);
  (void)err;
  return std::abs(v - std::complex<double>(0.0, 1.0));
}

// --- graded quadrature ------------------------------------------------------

// 12-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 6> kGlNode = {
    0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
    0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
constexpr std::array<double, 6> kGlWeight = {
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

template <class F>
double gl12(double lo, double hi, F&& f) {
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  double acc = 0.0;
  for (int i = 0; i < 6; ++i) {
    acc += kGlWeight[i] * (f(c - h * kGlNode[i]) + f(c + h * kGlNode[i]));
  }
  return acc * h;
}

// integral over [uf_eff, H] of f, dyadic cells shrinking toward 0.
template <class F>
double graded_integral(double H, double uf, F&& f) {
  double acc = 0.0;
  double hi = H;
  while (hi > uf) {
    double lo = std::max(hi * 0.5, uf);
    acc += gl12(lo, hi, f);
    hi = lo;
  }
  return acc;
}

// integral over [0, H] of (2 sin(pi u))^{-alpha} du (angle units, H <= 1/2).
double chord_half_gap_integral(double H, double alpha) {
  const double uf = 1e-15;
  // analytic core: (2 sin pi u)^{-a} = (2 pi u)^{-a} up to O(u^2) relative.
  double core_top = std::min(H, uf);
  double acc = std::pow(kTwoPi, -alpha) * std::pow(core_top, 1.0 - alpha) /
               (1.0 - alpha);
  if (H <= uf) return acc;
  acc += graded_integral(H, uf, [alpha](double u) {
    return std::pow(2.0 * std::sin(std::numbers::pi * u), -alpha);
  });
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Constructive points
// ---------------------------------------------------------------------------

LevelPoint construct_level_point(const LevelPointSpec& spec, double tol) {
  const int N = spec.steps;
  if (kDigitBits * (N + 1) + 53 > spec.bits) {
    throw PrecisionExhausted("angle precision too small for requested digits");
  }
  if (spec.cell < 0 || spec.cell >= kDigitBase) {
    throw ConfigInvalid("cell digit out of range");
  }
  std::vector<int> d(N + 2, 0);
  d[1] = spec.cell;
  for (int k = 1; k <= N; ++k) {
    int opt = (k == 4) ? spec.opt5 : (k == 6) ? spec.opt7 : (k == 8) ? spec.opt9 : 0;
    d[k + 1] = choose_digit(d, k, N, spec.sign1, opt);
  }
  BinaryAngle t = assemble_angle(d, N, spec.bits);
  double eta = gamma_residual(t, N);
  if (eta > tol) {
    throw PrecisionExhausted("greedy level-set targeting did not converge");
  }
  LevelPoint p;
  p.digits.assign(d.begin() + 1, d.end());
  p.t = t;
  p.residual = eta;
  return p;
}

std::vector<LevelPoint> construct_level_family(int steps, int bits, double tol) {
  std::vector<LevelPoint> out;
  out.reserve(512);
  for (int sign1 : {+1, -1}) {
    for (int opt5 : {0, 1}) {
      for (int opt7 : {0, 1}) {
        for (int opt9 : {0, 1}) {
          LevelPointSpec spec;
          spec.cell = 0;
          spec.sign1 = sign1;
          spec.opt5 = opt5;
          spec.opt7 = opt7;
          spec.opt9 = opt9;
          spec.steps = steps;
          spec.bits = bits;
          LevelPoint base = construct_level_point(spec, tol);
          // gamma(t + c/512) = gamma(t): shifting the leading digit moves the
          // point without changing any series phase.
          for (int cell = 0; cell < 32; ++cell) {
            LevelPoint p = base;
            p.digits[0] = cell;
            p.t = base.t.plus(BinaryAngle(BigInt(cell) << (bits - kDigitBits), bits));
            out.push_back(std::move(p));
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LevelPoint& x, const LevelPoint& y) { return x.t < y.t; });
  return out;
}

// ---------------------------------------------------------------------------
// Cover
// ---------------------------------------------------------------------------

std::size_t LevelSetCover::candidate_count() const {
  std::size_t n = 0;
  for (const auto& a : arcs) n += a.candidate ? 1 : 0;
  return n;
}

std::size_t LevelSetCover::witnessed_count() const {
  std::size_t n = 0;
  for (const auto& a : arcs) n += (a.candidate && a.witnessed) ? 1 : 0;
  return n;
}

namespace {

struct CoverBuilder {
  const LevelFunction& f;
  cplx target;
  double delta;
  double floor_len;
  std::size_t eval_budget;
  std::size_t evals = 0;
  std::vector<CoverArc> arcs;

  cplx eval(const BinaryAngle& t) {
    ++evals;
    return f.eval(t);
  }

  void emit(CoverArc arc) {
    if (!arcs.empty()) {
      CoverArc& prev = arcs.back();
      if (prev.candidate == arc.candidate && !prev.pinned && !arc.pinned &&
          prev.hi == arc.lo) {
        prev.hi = arc.hi;
        if (!prev.witnessed && arc.witnessed) {
          prev.witnessed = true;
          prev.witness = arc.witness;
          prev.witness_residual = arc.witness_residual;
        }
        return;
      }
    }
    arcs.push_back(std::move(arc));
  }

  void witness_and_emit(const BinaryAngle& lo, const BinaryAngle& hi) {
    CoverArc arc;
    arc.lo = lo;
    arc.hi = hi;
    arc.candidate = true;
    BigInt diff = hi.minus(lo).raw();
    for (int k : {0, 1, 8, 14, 15}) {
      BinaryAngle p = lo.plus(BinaryAngle((diff * k) >> 4, lo.bits()));
      double r = std::abs(eval(p) - target);
      if (r <= delta) {
        arc.witnessed = true;
        arc.witness = p;
        arc.witness_residual = r;
        break;
      }
    }
    emit(std::move(arc));
  }

  void classify(const BinaryAngle& lo, const BinaryAngle& hi) {
    double len = forward_gap(lo, hi);
    if (len <= 0.0 && lo == hi) return;
    BinaryAngle mid = lo.midpoint_to(hi);
    double resid = std::abs(eval(mid) - target);
    double reach = f.var_bound(chordal_of_angle(std::min(0.5, len * 0.5)));
    if (resid > delta + f.tail() + reach) {
      CoverArc arc;
      arc.lo = lo;
      arc.hi = hi;
      arc.candidate = false;
      emit(std::move(arc));
      return;
    }
    if (len <= floor_len || evals >= eval_budget) {
      witness_and_emit(lo, hi);
      return;
    }
    classify(lo, mid);
    classify(mid, hi);
  }
};

}  // namespace

LevelSetCover cover_level_set(const LevelFunction& f, cplx target, double delta,
                              std::int64_t resolution, int truncation,
                              const std::vector<BinaryAngle>& known_points) {
  if (delta <= f.tail()) {
    throw ConfigInvalid("level-set tolerance must exceed the truncation tail");
  }
  if (resolution < 2) throw ConfigInvalid("cover resolution must be >= 2");

  CoverBuilder b{f, target, delta, 1.0 / static_cast<double>(resolution),
                 static_cast<std::size_t>(64) * static_cast<std::size_t>(resolution)};

  std::vector<BinaryAngle> pts = known_points;
  std::sort(pts.begin(), pts.end());
  const int bits = pts.empty() ? BinaryAngle::kDefaultBits : pts.front().bits();
  for (const auto& p : pts) {
    double r = std::abs(f.eval(p) - target);
    if (r > delta) {
      throw AuditFailure("claimed level-set point fails its own tolerance");
    }
  }

  if (pts.empty()) {
    BinaryAngle zero = BinaryAngle::zero(bits);
    BinaryAngle half = BinaryAngle::from_fraction(1, 2, bits);
    b.classify(zero, half);
    b.classify(half, zero);
  } else {
    // Tiny pinned arc around each constructed point, gaps classified between.
    int hw_shift = std::max(1, bits - 90);
    BinaryAngle hw(BigInt(1) << hw_shift, bits);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const BinaryAngle& p = pts[i];
      const BinaryAngle& q = pts[(i + 1) % pts.size()];
      CoverArc arc;
      arc.lo = p.minus(hw);
      arc.hi = p.plus(hw);
      arc.candidate = true;
      arc.witnessed = true;
      arc.pinned = true;
      arc.witness = p;
      arc.witness_residual = std::abs(f.eval(p) - target);
      b.emit(std::move(arc));
      b.classify(p.plus(hw), q.minus(hw));
    }
  }

  std::sort(b.arcs.begin(), b.arcs.end(),
            [](const CoverArc& x, const CoverArc& y) { return x.lo < y.lo; });
  LevelSetCover cover;
  cover.arcs = std::move(b.arcs);
  cover.delta = delta;
  cover.truncation = truncation;
  return cover;
}

LevelSetCover cover_gamma_level_set(int truncation, double delta,
                                    std::int64_t resolution, int bits) {
  std::vector<LevelPoint> family = construct_level_family(truncation, bits);
  std::vector<BinaryAngle> pts;
  pts.reserve(family.size());
  for (const auto& p : family) pts.push_back(p.t);
  LacunarySeries s;
  s.N = truncation;
  GammaLevel f(s);
  LevelSetCover cover =
      cover_level_set(f, cplx(0.0, 1.0), delta, resolution, truncation, pts);
  if (cover.witnessed_count() == 0) {
    throw LevelSetEmpty("no witnessed candidate arcs for the gamma level set");
  }
  return cover;
}

// ---------------------------------------------------------------------------
// Tree
// ---------------------------------------------------------------------------

CantorTree build_cantor(const LevelSetCover& cover, int depth,
                        std::uint64_t /*rng_seed*/) {
  if (depth < 1) throw ConfigInvalid("tree depth must be >= 1");
  bool any_pinned = false;
  for (const auto& a : cover.arcs) {
    if (a.candidate && a.witnessed && a.pinned) {
      any_pinned = true;
      break;
    }
  }
  std::vector<BinaryAngle> pts;
  for (const auto& a : cover.arcs) {
    if (!a.candidate || !a.witnessed) continue;
    if (any_pinned && !a.pinned) continue;  // keep only the constructed points
    pts.push_back(a.lo.midpoint_to(a.hi));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const std::size_t need = std::size_t(1) << (depth + 1);
  if (pts.size() < need) {
    int feasible = -1;
    while (pts.size() >= (std::size_t(1) << (feasible + 2))) ++feasible;
    std::ostringstream msg;
    msg << "need " << need << " candidate points for depth " << depth
        << ", have " << pts.size();
    throw DepthUnreachable(msg.str(), feasible);
  }

  // Start the linear order just past the largest cyclic gap between points.
  std::size_t cut = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double g = forward_gap(pts[i], pts[(i + 1) % pts.size()]);
    if (g > best) {
      best = g;
      cut = (i + 1) % pts.size();
    }
  }
  std::rotate(pts.begin(), pts.begin() + cut, pts.end());

  CantorTree tree;
  tree.depth = depth;
  tree.levels.resize(depth);
  struct Range {
    std::size_t lo, hi;
  };
  std::vector<Range> ranges{{0, pts.size()}};
  for (int n = 1; n <= depth; ++n) {
    std::vector<Range> next;
    next.reserve(ranges.size() * 2);
    for (const Range& r : ranges) {
      std::size_t m = r.hi - r.lo;
      std::size_t left = (m + 1) / 2;
      next.push_back({r.lo, r.lo + left});
      next.push_back({r.lo + left, r.hi});
    }
    ranges = std::move(next);
    tree.levels[n - 1].reserve(ranges.size());
    for (const Range& r : ranges) {
      tree.levels[n - 1].push_back({pts[r.lo], pts[r.hi - 1]});
    }
  }

  CantorAudit audit = audit_cantor_tree(tree);
  if (!audit.com2_ordering) {
    throw AuditFailure("cantor intervals violate lexicographic ordering");
  }
  if (!audit.com3_shrinkage) {
    throw AuditFailure("cantor interval exceeds the 1/n! shrinkage bound");
  }
  return tree;
}

CantorAudit audit_cantor_tree(const CantorTree& tree) {
  CantorAudit out;
  if (tree.levels.empty()) return out;

  out.com1_nesting = true;
  for (int n = 1; n < tree.depth; ++n) {
    const auto& parents = tree.levels[n - 1];
    const auto& children = tree.levels[n];
    if (children.size() != 2 * parents.size()) {
      out.com1_nesting = false;
      break;
    }
    for (std::size_t i = 0; i < parents.size(); ++i) {
      if (!(children[2 * i].a == parents[i].a) ||
          !(children[2 * i + 1].b == parents[i].b)) {
        out.com1_nesting = false;
      }
    }
  }

  out.com2_ordering = true;
  for (const auto& level : tree.levels) {
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (!(level[i].a < level[i].b)) out.com2_ordering = false;
      if (i + 1 < level.size() && !(level[i].b < level[i + 1].a)) {
        out.com2_ordering = false;
      }
    }
  }

  out.com3_shrinkage = true;
  out.gap_measure_collapse = true;
  double factorial = 1.0;
  for (int n = 1; n <= tree.depth; ++n) {
    factorial *= n;
    double level_sum = 0.0;
    for (const auto& iv : tree.levels[n - 1]) {
      double len = chordal_distance(iv.a, iv.b);
      level_sum += len;
      double ratio = len * factorial;
      out.worst_shrinkage_ratio = std::max(out.worst_shrinkage_ratio, ratio);
      if (ratio >= 1.0) out.com3_shrinkage = false;
    }
    if (level_sum >= std::ldexp(1.0, n) / factorial) {
      out.gap_measure_collapse = false;
    }
  }
  return out;
}

DistBracket dist_to_K(const BinaryAngle& z, const CantorTree& tree) {
  if (tree.levels.empty() || tree.deepest().empty()) {
    throw ConfigInvalid("dist_to_K on an empty tree");
  }
  double lower = 2.0, upper = 2.0;
  for (const auto& iv : tree.deepest()) {
    double da = chordal_distance(z, iv.a);
    double db = chordal_distance(z, iv.b);
    upper = std::min({upper, da, db});
    bool inside = forward_gap(iv.a, z) <= forward_gap(iv.a, iv.b);
    lower = std::min(lower, inside ? 0.0 : std::min(da, db));
  }
  return {lower, upper};
}

// ---------------------------------------------------------------------------
// Integrability
// ---------------------------------------------------------------------------

IntegrabilityReport integrability_report(const CantorTree& tree, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw UnsupportedExponent("integrability exponent must lie in (0,1)");
  }
  const auto& leaves = tree.deepest();
  if (leaves.empty()) throw ConfigInvalid("integrability on an empty tree");

  IntegrabilityReport report;
  report.alpha = alpha;
  report.gaps.reserve(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const BinaryAngle& from = leaves[i].b;
    const BinaryAngle& to = leaves[(i + 1) % leaves.size()].a;
    double G = forward_gap(from, to);
    GapEntry e;
    e.index = i;
    e.angle_length = G;
    // dist(u) = 2 sin(pi min(u, G-u)) inside the gap; arc-length measure.
    e.contribution = 2.0 * kTwoPi * chord_half_gap_integral(G * 0.5, alpha);
    double L = kTwoPi * G;
    e.closed_form = std::pow(2.0, alpha) * std::pow(L, 1.0 - alpha) / (1.0 - alpha);
    report.total += e.contribution;
    report.gaps.push_back(e);
  }

  int terms = std::max(tree.depth, 12);
  double sum = 0.0;
  double fact = 1.0;  // (n-1)! for n = 1
  for (int n = 1; n <= terms; ++n) {
    if (n >= 2) fact *= (n - 1);
    sum += std::ldexp(1.0, n) / std::pow(fact, 1.0 - alpha);
    report.comparison_partial_sums.push_back(sum);
  }
  return report;
}

double straight_gap_quadrature(double L, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw UnsupportedExponent("integrability exponent must lie in (0,1)");
  }
  if (!(L > 0.0)) throw ConfigInvalid("gap length must be positive");
  const double H = L * 0.5;
  const double uf = H * std::ldexp(1.0, -40);
  double acc = std::pow(uf, 1.0 - alpha) / (1.0 - alpha);
  acc += graded_integral(H, uf, [alpha](double x) { return std::pow(x, -alpha); });
  return 2.0 * acc;
}

double straight_gap_closed_form(double L, double alpha) {
  return std::pow(2.0, alpha) * std::pow(L, 1.0 - alpha) / (1.0 - alpha);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

nlohmann::json cantor_tree_to_json(const CantorTree& tree) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& level : tree.levels) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& iv : level) {
      arr.push_back({{"a_hex", iv.a.to_hex()}, {"b_hex", iv.b.to_hex()}});
    }
    levels.push_back(std::move(arr));
  }
  return nlohmann::json{{"depth", tree.depth}, {"levels", std::move(levels)}};
}

CantorTree cantor_tree_from_json(const nlohmann::json& j) {
  CantorTree tree;
  tree.depth = j.at("depth").get<int>();
  for (const auto& level : j.at("levels")) {
    std::vector<CantorInterval> out;
    out.reserve(level.size());
    for (const auto& iv : level) {
      std::string a_hex = iv.at("a_hex").get<std::string>();
      std::string b_hex = iv.at("b_hex").get<std::string>();
      int bits = static_cast<int>(a_hex.size()) * 4;
      out.push_back({BinaryAngle::from_hex(a_hex, bits),
                     BinaryAngle::from_hex(b_hex, bits)});
    }
    tree.levels.push_back(std::move(out));
  }
  if (tree.levels.size() != static_cast<std::size_t>(tree.depth)) {
    throw ConfigInvalid("cantor tree JSON depth/levels mismatch");
  }
  return tree;
}

}  // namespace hcop
