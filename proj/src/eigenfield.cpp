#include "hcop/eigenfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hcop/errors.hpp"

namespace hcop {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// 12-point Gauss-Legendre rule on [-1, 1] (positive half; rule is symmetric).
constexpr std::array<double, 6> kGlNode = {
    0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
    0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
constexpr std::array<double, 6> kGlWeight = {
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

cplx unit(double turns) {
  return {std::cos(kTwoPi * turns), std::sin(kTwoPi * turns)};
}

}  // namespace

// ---------------------------------------------------------------------------
// FunctionField
// ---------------------------------------------------------------------------

FunctionField::FunctionField(const CantorTree& tree, LacunarySeries series,
                             int quad_terms)
    : tree_(&tree), series_(series), quad_terms_(quad_terms) {
  if (quad_terms < 1 || quad_terms > 8 || quad_terms > series.N) {
    throw ConfigInvalid("FunctionField: quad_terms must be in [1, min(8, N)]");
  }
}

double FunctionField::quad_tail() const {
  return std::pow(series_.a_base, -quad_terms_) *
         series_.a_base / (series_.a_base - 1.0);
}

double FunctionField::psi_lipschitz_turns() const {
  double L = 0.0, coef = 1.0;
  for (int n = 1; n <= quad_terms_; ++n) {
    L += 2.0 * coef * kTwoPi * std::ldexp(1.0, series_.b_log2 * n);
    coef /= series_.a_base;
  }
  return L;
}

FieldValues FunctionField::eval(const BinaryAngle& w) const {
  FieldValues out;
  out.dist = dist_to_K(w, *tree_);
  auto [psi, psi_bar] = series_.psi_eval(w);
  out.psi = psi;
  out.psi_bar = psi_bar;
  out.on_K = out.dist.lower <= 0.0;

  const cplx wc = w.to_complex();
  if (out.on_K) {
    out.h = 0.0;
    out.h_bar = (std::abs(psi) + psi_bar) * std::cbrt(out.dist.upper);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.g = out.g1 = cplx(nan, nan);
    out.g_bar = out.g1_bar = std::numeric_limits<double>::infinity();
    return out;
  }
  const double d = 0.5 * (out.dist.lower + out.dist.upper);
  const double spread = 0.5 * (out.dist.upper - out.dist.lower);
  const double d13 = std::cbrt(d);
  out.h = psi * d13;
  out.h_bar = psi_bar * d13 +
              (std::abs(psi) + psi_bar) * (spread / (3.0 * d13 * d13)) +
              8.0 * std::abs(out.h) * 1e-16;
  const double dm13 = 1.0 / d13;
  out.g1 = -kI * dm13;
  out.g = std::conj(wc) * out.g1;
  out.g_bar = out.g1_bar =
      dm13 * spread / (3.0 * d) + 8.0 * dm13 * 1e-16;
  return out;
}

cplx FunctionField::g_at(const BinaryAngle& w) const {
  FieldValues v = eval(w);
  if (v.on_K) {
    throw PrecisionExhausted(
        "g is singular: point lies inside a deepest-level interval of K");
  }
  return v.g;
}

std::array<double, 8> FunctionField::phases(const BinaryAngle& base) const {
  std::array<double, 8> ph{};
  for (int n = 1; n <= quad_terms_; ++n) {
    ph[n - 1] = base.pow2_shift(series_.b_log2 * n).to_double();
  }
  return ph;
}

double FunctionField::psi_quad(const std::array<double, 8>& base_phases,
                               double offset) const {
  double s = 0.0, coef = 1.0;
  for (int n = 1; n <= quad_terms_; ++n) {
    const double phi = base_phases[n - 1] +
                       std::ldexp(offset, series_.b_log2 * n);
    s += 2.0 * coef * std::cos(kTwoPi * phi);
    coef /= series_.a_base;
  }
  return s;
}

double FunctionField::psi_quad_at(const BinaryAngle& w) const {
  return psi_quad(phases(w), 0.0);
}

// ---------------------------------------------------------------------------
// Mesh
// ---------------------------------------------------------------------------

double GapMesh::node_dist(std::size_t i) const {
  return 2.0 * std::sin(std::numbers::pi * std::abs(nodes[i].offset));
}

double default_cell_cap(const FunctionField& f) {
  return 1.5 * std::ldexp(1.0, -f.series().b_log2 * f.quad_terms());
}

double exclusion_radius(int depth) { return 1.0 / factorial(depth); }

namespace {

// Emits 12-point Gauss-Legendre nodes for offsets [x0, x1] (turns, measured
// from `endpoint` into the gap; sign = +1 forward, -1 backward).
void emit_cell(const FunctionField& f, GapMesh& mesh, std::int32_t endpoint,
               double sign, double x0, double x1) {
  const auto& ph = mesh.endpoint_phases[endpoint];
  const double c = 0.5 * (x0 + x1), h = 0.5 * (x1 - x0);
  for (int i = 0; i < 6; ++i) {
    for (double s : {-1.0, 1.0}) {
      const double u = c + s * h * kGlNode[i];
      const double off = sign * u;
      mesh.nodes.push_back(MeshNode{endpoint, off, h * kGlWeight[i],
                                    f.psi_quad(ph, off)});
    }
  }
}

void mesh_half_gap(const FunctionField& f, GapMesh& mesh,
                   std::int32_t endpoint, double sign, double half,
                   double cell_cap, int levels) {
  double lo = std::ldexp(half, -levels);
  mesh.omitted_measure += lo;
  for (int k = levels; k >= 1; --k) {
    const double hi = std::ldexp(half, -(k - 1));
    const int parts = std::max(1, (int)std::ceil((hi - lo) / cell_cap));
    for (int p = 0; p < parts; ++p) {
      emit_cell(f, mesh, endpoint, sign, lo + (hi - lo) * p / parts,
                lo + (hi - lo) * (p + 1) / parts);
    }
    lo = hi;
  }
}

}  // namespace

GapMesh build_gap_mesh(const FunctionField& f, double cell_cap, int levels) {
  if (!(cell_cap > 0.0) || levels < 4) {
    throw ConfigInvalid("build_gap_mesh: need cell_cap > 0 and levels >= 4");
  }
  const auto& leaves = f.tree().deepest();
  GapMesh mesh;
  mesh.cell_cap = cell_cap;
  mesh.levels = levels;
  const std::size_t n = leaves.size();
  mesh.endpoints.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    // K carries no quadrature mass; account for the leaf measure anyway.
    mesh.omitted_measure += forward_gap(leaves[i].a, leaves[i].b);
    const BinaryAngle& left = leaves[i].b;
    const BinaryAngle& right = leaves[(i + 1) % n].a;
    const double gap = forward_gap(left, right);
    const std::int32_t li = (std::int32_t)mesh.endpoints.size();
    mesh.endpoints.push_back(left);
    mesh.endpoints.push_back(right);
    mesh.endpoint_phases.push_back(f.phases(left));
    mesh.endpoint_phases.push_back(f.phases(right));
    mesh.endpoint_point.push_back(left.to_complex());
    mesh.endpoint_point.push_back(right.to_complex());
    mesh_half_gap(f, mesh, li, +1.0, gap / 2.0, cell_cap, levels);
    mesh_half_gap(f, mesh, li + 1, -1.0, gap / 2.0, cell_cap, levels);
  }
  return mesh;
}

std::vector<double> endpoint_deltas(const GapMesh& mesh,
                                    const BinaryAngle& lambda) {
  std::vector<double> d(mesh.endpoints.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    double t = mesh.endpoints[i].minus(lambda).to_double();
    if (t > 0.5) t -= 1.0;
    d[i] = t;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Identity verification
// ---------------------------------------------------------------------------

namespace {

struct DirectValues {
  cplx h_lambda_g;
  cplx h_lambda_g1;
};

// Quadrature of <h_lambda, g> and <h_lambda, g1> with the psi(lambda)
// subtraction; the subtracted term is restored through the exact principal
// values int w/(lambda-w) dmu = -1/2 and int 1/(lambda-w) dmu = 1/(2 lambda).
DirectValues direct_inner(const FunctionField& f, const GapMesh& mesh,
                          const BinaryAngle& lambda) {
  const cplx lam = lambda.to_complex();
  const double psi_lam = f.psi_quad_at(lambda);
  const auto deltas = endpoint_deltas(mesh, lambda);
  cplx qg = 0.0, qg1 = 0.0;
  for (const MeshNode& nd : mesh.nodes) {
    const double dt = deltas[nd.endpoint] + nd.offset;
    const cplx e2 = unit(dt);
    const cplx w = lam * e2;
    const cplx denom = lam - w;
    if (denom == cplx(0.0)) continue;
    const double d13 = std::cbrt(2.0 * std::sin(std::numbers::pi * std::abs(nd.offset)));
    // h(w) conj(g(w)) = [psi d^{1/3}] [i w d^{-1/3}]; the dist factors are
    // evaluated and cancelled at the node.
    const double hfac = (nd.psi * d13) / d13 - psi_lam;
    const cplx k = nd.weight * hfac / denom;
    qg += k * w;
    qg1 += k;
  }
  DirectValues out;
  out.h_lambda_g = kI * (qg + psi_lam * cplx(-0.5));
  out.h_lambda_g1 = kI * (qg1 + psi_lam * (0.5 / lam));
  return out;
}

cplx quad_h_g1(const GapMesh& mesh) {
  // <h, g1> integrand: psi d^{1/3} * i d^{-1/3} = i psi.
  double s = 0.0;
  for (const MeshNode& nd : mesh.nodes) s += nd.weight * nd.psi;
  return kI * s;
}

double sup_psi(const FunctionField& f) {
  double s = 0.0, coef = 1.0;
  for (int n = 1; n <= f.quad_terms(); ++n) {
    s += 2.0 * coef;
    coef /= f.series().a_base;
  }
  return s;
}

}  // namespace

IdentityVerifier::IdentityVerifier(const FunctionField& f, double cell_cap,
                                   int levels)
    : field_(&f) {
  const double freq = std::ldexp(1.0, f.series().b_log2 * f.quad_terms());
  const double limit = 1.6 / freq;
  if (cell_cap > limit) {
    throw AccuracyUnattainable(
        "quadrature grid too coarse for the truncated series frequency " +
        std::to_string((long long)freq) + ": need cell_cap <= " +
        std::to_string(limit) + " turns, got " + std::to_string(cell_cap));
  }
  mesh_ = build_gap_mesh(f, cell_cap, levels);
  mesh_coarse_ = build_gap_mesh(f, 2.0 * cell_cap, levels);
  h_g1_fine_ = quad_h_g1(mesh_);
  h_g1_coarse_ = quad_h_g1(mesh_coarse_);
}

std::array<IdentityRecord, 3> IdentityVerifier::verify(
    const BinaryAngle& lambda) const {
  const FunctionField& f = *field_;
  const cplx lam = lambda.to_complex();
  const cplx laminv = std::conj(lam);

  const DirectValues fine = direct_inner(f, mesh_, lambda);
  const DirectValues coarse = direct_inner(f, mesh_coarse_, lambda);

  // Bounded-integrand bound for mass missing from the mesh: the subtracted
  // integrand obeys |psi(w)-psi(lambda)| / |lambda-w| <= L/4 with L the
  // truncated-psi Lipschitz constant in turns (chord >= 4 |turn difference|).
  const double omit_bar = 0.25 * f.psi_lipschitz_turns() *
                          mesh_.omitted_measure;
  const double tail_bar = f.quad_tail();

  auto [gval, gbar] = f.series().gamma_eval(lambda.negated());

  std::array<IdentityRecord, 3> rec;
  rec[0].id = "h_lambda_g";
  rec[0].lambda = lam;
  rec[0].target = 1.0;
  rec[0].analytic = kI * gval;
  rec[0].analytic_bar = gbar;
  rec[0].direct = fine.h_lambda_g;
  rec[0].direct_bar = std::abs(fine.h_lambda_g - coarse.h_lambda_g) +
                      tail_bar + omit_bar + 1e-12;

  rec[1].id = "h_lambda_g1";
  rec[1].lambda = lam;
  rec[1].target = laminv;
  rec[1].analytic = kI * laminv * gval;
  rec[1].analytic_bar = gbar;
  rec[1].direct = fine.h_lambda_g1;
  rec[1].direct_bar = std::abs(fine.h_lambda_g1 - coarse.h_lambda_g1) +
                      tail_bar + omit_bar + 1e-12;

  rec[2].id = "h_g1";
  rec[2].lambda = lam;
  rec[2].target = 0.0;
  // <h, g1> = i <psi, 1> = 0 at coefficient level: every series term has a
  // non-zero frequency, so the mean vanishes exactly (truncation included).
  rec[2].analytic = 0.0;
  rec[2].analytic_bar = 0.0;
  rec[2].direct = h_g1_fine_;
  rec[2].direct_bar = std::abs(h_g1_fine_ - h_g1_coarse_) +
                      sup_psi(f) * mesh_.omitted_measure + 1e-12;

  for (auto& r : rec) {
    r.analytic_residual = std::abs(r.analytic - r.target);
    r.direct_residual = std::abs(r.direct - r.target);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Pointwise identity (uhl)
// ---------------------------------------------------------------------------

double verify_uhl(const FunctionField& f, cplx lambda,
                  const std::vector<BinaryAngle>& samples) {
  double worst = 0.0;
  for (const BinaryAngle& w : samples) {
    const FieldValues v = f.eval(w);
    const cplx wc = w.to_complex();
    if (lambda == wc) continue;
    const cplx hl = v.h / (lambda - wc);
    const cplx r1 = wc * hl - (lambda * hl - v.h);
    const cplx r2 = hl / wc - (hl / lambda + (v.h / wc) / lambda);
    const double scale = std::max({std::abs(wc * hl), std::abs(v.h), 1e-300});
    worst = std::max(worst, std::max(std::abs(r1), std::abs(r2)) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// L2 quantities
// ---------------------------------------------------------------------------

double norm_h(const FunctionField& f, const GapMesh& mesh) {
  (void)f;
  double s = 0.0;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const MeshNode& nd = mesh.nodes[i];
    const double d13 = std::cbrt(mesh.node_dist(i));
    const double hv = nd.psi * d13;
    s += nd.weight * hv * hv;
  }
  return std::sqrt(s);
}

double norm2_h_lambda(const FunctionField& f, const GapMesh& mesh,
                      const BinaryAngle& lambda) {
  const double r = exclusion_radius(f.tree().depth);
  const auto deltas = endpoint_deltas(mesh, lambda);
  double s = 0.0;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const MeshNode& nd = mesh.nodes[i];
    const double dt = deltas[nd.endpoint] + nd.offset;
    const double chord = 2.0 * std::abs(std::sin(std::numbers::pi * dt));
    if (chord < r) continue;
    const double d13 = std::cbrt(mesh.node_dist(i));
    const double hv = nd.psi * d13;
    s += nd.weight * hv * hv / (chord * chord);
  }
  return s;
}

double norm2_pair_diff(const FunctionField& f, const GapMesh& mesh,
                       const BinaryAngle& z, const BinaryAngle& s) {
  const double r = exclusion_radius(f.tree().depth);
  const auto dz = endpoint_deltas(mesh, z);
  const auto ds = endpoint_deltas(mesh, s);
  const double sep2 = std::norm(z.to_complex() - s.to_complex());
  double acc = 0.0;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const MeshNode& nd = mesh.nodes[i];
    const double cz =
        2.0 * std::abs(std::sin(std::numbers::pi * (dz[nd.endpoint] + nd.offset)));
    const double cs =
        2.0 * std::abs(std::sin(std::numbers::pi * (ds[nd.endpoint] + nd.offset)));
    if (cz < r || cs < r) continue;
    const double d13 = std::cbrt(mesh.node_dist(i));
    const double hv = nd.psi * d13;
    acc += nd.weight * hv * hv * sep2 / (cz * cz * cs * cs);
  }
  return acc;
}

std::vector<std::pair<BinaryAngle, BinaryAngle>> octave_pairs(
    const CantorTree& tree, int octaves, int per_octave) {
  const auto& leaves = tree.deepest();
  const std::size_t n = leaves.size();
  if (n % 32 != 0 || n < 32) {
    throw ConfigInvalid("octave_pairs: tree does not have the 32-cell layout");
  }
  const std::size_t per_cell = n / 32;
  std::vector<std::pair<BinaryAngle, BinaryAngle>> out;
  const int max_delta = 1 << (octaves - 1);
  if (max_delta >= 32) {
    throw ConfigInvalid("octave_pairs: too many octaves for 32 cells");
  }
  for (int o = 0; o < octaves; ++o) {
    const int delta = 1 << (octaves - 1 - o);
    for (int p = 0; p < per_octave; ++p) {
      // The base endpoint (c, j) is held fixed across octaves so that the
      // per-octave decrease can be read off pairwise for each base.
      const int c = (p * 5) % (32 - max_delta);
      const std::size_t j = (std::size_t)(p * 3) % per_cell;
      out.emplace_back(leaves[c * per_cell + j].a,
                       leaves[(c + delta) * per_cell + j].a);
    }
  }
  return out;
}

std::vector<ContinuityRow> continuity_modulus(
    const FunctionField& f, const GapMesh& mesh,
    const std::vector<std::pair<BinaryAngle, BinaryAngle>>& pairs) {
  std::vector<ContinuityRow> rows;
  rows.reserve(pairs.size());
  double sep_max = 0.0;
  for (const auto& [z, s] : pairs) {
    sep_max = std::max(sep_max, chordal_distance(z, s));
  }
  for (const auto& [z, s] : pairs) {
    ContinuityRow row;
    row.z = z;
    row.s = s;
    row.sep = chordal_distance(z, s);
    row.norm2 = norm2_pair_diff(f, mesh, z, s);
    row.ratio = row.sep > 0.0 ? row.norm2 / std::cbrt(row.sep) : 0.0;
    row.octave = row.sep > 0.0
                     ? (int)std::lround(std::log2(sep_max / row.sep))
                     : 0;
    rows.push_back(row);
  }
  return rows;
}

EigenIdentityCheck eigen_identity_check(const FunctionField& f,
                                        const GapMesh& mesh,
                                        const BinaryAngle& lambda) {
  const cplx lam = lambda.to_complex();
  const cplx c = direct_inner(f, mesh, lambda).h_lambda_g;
  const double r = exclusion_radius(f.tree().depth);
  const auto deltas = endpoint_deltas(mesh, lambda);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const MeshNode& nd = mesh.nodes[i];
    const double dt = deltas[nd.endpoint] + nd.offset;
    const cplx w = lam * unit(dt);
    const cplx dd = lam - w;
    const double chord = std::abs(dd);
    if (chord < r) continue;
    const double d13 = std::cbrt(mesh.node_dist(i));
    const cplx hv = nd.psi * d13;
    const cplx hl = hv / dd;
    // (T h_lambda)(w) - lambda h_lambda(w) with T = U + <., g> h, assembled
    // pointwise: w h_lambda + c h - lambda h_lambda.
    const cplx resid = (w - lam) * hl + c * hv;
    num += nd.weight * std::norm(resid);
    den += nd.weight * std::norm(hv);
  }
  EigenIdentityCheck out;
  out.inner_h_lambda_g = c;
  out.lhs = den > 0.0 ? std::sqrt(num / den) : 0.0;
  out.rhs = std::abs(c - 1.0);
  out.rel_gap = std::abs(out.lhs - out.rhs) / std::max(out.rhs, 1e-300);
  return out;
}

}  // namespace hcop
