#include "hcop/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "hcop/belov.hpp"
#include "hcop/cantor.hpp"
#include "hcop/decomp.hpp"
#include "hcop/eigenfield.hpp"
#include "hcop/errors.hpp"
#include "hcop/galerkin.hpp"
#include "hcop/orbitlab.hpp"

namespace hcop {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

void PipelineConfig::validate() const {
  if (truncation < 1 || truncation > 24) {
    throw ConfigInvalid("config: truncation must lie in [1, 24]");
  }
  if (9 * truncation + 53 > bits) {
    throw ConfigInvalid("config: need 9*truncation + 53 <= bits (got 9*" +
                        std::to_string(truncation) + "+53 > " +
                        std::to_string(bits) + ")");
  }
  const double tail = std::pow(8.0, 1 - truncation) / 7.0;
  if (!(delta > tail)) {
    throw ConfigInvalid("config: delta must exceed the series tail 8^{1-N}/7 = " +
                        std::to_string(tail));
  }
  if (depth < 1 || depth > 12) throw ConfigInvalid("config: depth out of range");
  if (m < 1 || (double)m > std::ldexp(1.0, depth)) {
    throw ConfigInvalid("config: need m <= 2^depth");
  }
  if (quad_terms < 1 || quad_terms > std::min(8, truncation)) {
    throw ConfigInvalid("config: quad_terms must lie in [1, min(8, truncation)]");
  }
  if (mesh_levels < 4 || !(cell_cap_scale > 0.0)) {
    throw ConfigInvalid("config: bad quadrature sizes");
  }
  if (lambda_checks < 1 || orbit_steps < 1 || n_seeds < 1 || threads < 1 ||
      resolution < 1024 || !(orbit_eps > 0.0 && orbit_eps <= 2.0)) {
    throw ConfigInvalid("config: bad scalar parameter");
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section header
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigInvalid("config line " + std::to_string(lineno) +
                          ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') {
      val = val.substr(1, val.size() - 2);
    }
    try {
      if (key == "truncation") c.truncation = std::stoi(val);
      else if (key == "bits") c.bits = std::stoi(val);
      else if (key == "delta") c.delta = std::stod(val);
      else if (key == "resolution") c.resolution = std::stoll(val);
      else if (key == "depth") c.depth = std::stoi(val);
      else if (key == "quad_terms") c.quad_terms = std::stoi(val);
      else if (key == "mesh_levels") c.mesh_levels = std::stoi(val);
      else if (key == "cell_cap_scale") c.cell_cap_scale = std::stod(val);
      else if (key == "m") c.m = std::stoi(val);
      else if (key == "lambda_checks") c.lambda_checks = std::stoi(val);
      else if (key == "orbit_steps") c.orbit_steps = std::stoi(val);
      else if (key == "orbit_eps") c.orbit_eps = std::stod(val);
      else if (key == "n_seeds") c.n_seeds = std::stoi(val);
      else if (key == "seed") c.seed = (std::uint64_t)std::stoull(val);
      else if (key == "threads") c.threads = std::stoi(val);
      else if (key == "out_dir") c.out_dir = val;
      else throw ConfigInvalid("config: unknown key '" + key + "'");
    } catch (const ConfigInvalid&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigInvalid("config: bad value for '" + key + "': " + val);
    }
  }
  return c;
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("config file not readable: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string print_config(const PipelineConfig& c) {
  std::ostringstream o;
  o << "truncation = " << c.truncation << "\n"
    << "bits = " << c.bits << "\n"
    << "delta = " << c.delta << "\n"
    << "resolution = " << c.resolution << "\n"
    << "depth = " << c.depth << "\n"
    << "quad_terms = " << c.quad_terms << "\n"
    << "mesh_levels = " << c.mesh_levels << "\n"
    << "cell_cap_scale = " << c.cell_cap_scale << "\n"
    << "m = " << c.m << "\n"
    << "lambda_checks = " << c.lambda_checks << "\n"
    << "orbit_steps = " << c.orbit_steps << "\n"
    << "orbit_eps = " << c.orbit_eps << "\n"
    << "n_seeds = " << c.n_seeds << "\n"
    << "seed = " << c.seed << "\n"
    << "threads = " << c.threads << "\n"
    << "out_dir = \"" << c.out_dir << "\"\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// Hashing / manifest
// ---------------------------------------------------------------------------

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::ostringstream ss;
  ss << in.rdbuf();
  return content_hash(ss.str());
}

json RunManifest::to_json() const {
  json js;
  js["tool_version"] = tool_version;
  js["config_hash"] = config_hash;
  js["stages"] = json::array();
  for (const StageRecord& s : stages) {
    json st;
    st["name"] = s.name;
    st["status"] = s.status;
    st["cache_key"] = s.cache_key;
    st["wall_time_s"] = s.wall_time_s;
    st["checks_pass"] = s.checks_pass;
    st["error"] = s.error;
    st["artifacts"] = json::array();
    for (const StageArtifact& a : s.artifacts) {
      st["artifacts"].push_back({{"path", a.path}, {"hash", a.hash}});
    }
    js["stages"].push_back(std::move(st));
  }
  return js;
}

RunManifest RunManifest::from_json(const json& js) {
  RunManifest m;
  m.tool_version = js.value("tool_version", "");
  m.config_hash = js.value("config_hash", "");
  for (const auto& st : js.value("stages", json::array())) {
    StageRecord s;
    s.name = st.value("name", "");
    s.status = st.value("status", "");
    s.cache_key = st.value("cache_key", "");
    s.wall_time_s = st.value("wall_time_s", 0.0);
    s.checks_pass = st.value("checks_pass", false);
    s.error = st.value("error", "");
    for (const auto& a : st.value("artifacts", json::array())) {
      s.artifacts.push_back({a.value("path", ""), a.value("hash", "")});
    }
    m.stages.push_back(std::move(s));
  }
  return m;
}

std::vector<std::string> pipeline_stage_names() {
  return {"belov-check", "build-cantor", "verify-identities",
          "build-model", "decompose",    "orbit"};
}

// ---------------------------------------------------------------------------
// Stage context
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Ctx {
  const PipelineConfig& cfg;
  fs::path out;
  std::unique_ptr<CantorTree> tree;
  std::unique_ptr<FunctionField> field;
  std::unique_ptr<GapMesh> gram_mesh;
  std::unique_ptr<GalerkinModel> model;

  LacunarySeries series() const {
    LacunarySeries s;
    s.N = cfg.truncation;
    return s;
  }

  const CantorTree& ensure_tree() {
    if (!tree) {
      const fs::path p = out / "tree.json";
      if (!fs::exists(p)) {
        throw Error("pipeline: tree artifact missing; run build-cantor first");
      }
      std::ifstream in(p);
      json j;
      in >> j;
      tree = std::make_unique<CantorTree>(cantor_tree_from_json(j));
    }
    return *tree;
  }

  const FunctionField& ensure_field() {
    if (!field) {
      field = std::make_unique<FunctionField>(ensure_tree(), series(),
                                              cfg.quad_terms);
    }
    return *field;
  }

  const GapMesh& ensure_gram_mesh() {
    if (!gram_mesh) {
      const FunctionField& f = ensure_field();
      // |h|^2 doubles the top frequency of the truncated series, so the gram
      // mesh uses half the single-factor cell cap.
      gram_mesh = std::make_unique<GapMesh>(build_gap_mesh(
          f, 0.5 * default_cell_cap(f) * cfg.cell_cap_scale, cfg.mesh_levels));
    }
    return *gram_mesh;
  }

  const GalerkinModel& ensure_model() {
    if (!model) {
      const fs::path p = out / "model.json";
      if (!fs::exists(p)) {
        throw Error("pipeline: model artifact missing; run build-model first");
      }
      std::ifstream in(p);
      json j;
      in >> j;
      model = std::make_unique<GalerkinModel>(model_from_json(j));
    }
    return *model;
  }

  StageArtifact write(const std::string& name, const std::string& bytes) {
    const fs::path p = out / name;
    std::ofstream o(p, std::ios::binary | std::ios::trunc);
    o << bytes;
    o.close();
    return {name, content_hash(bytes)};
  }
};

// Nested eigenvalue-set sizes exercised by decompose/orbit.
std::vector<int> nested_sizes(int m) {
  std::vector<int> sizes;
  for (int k : {8, 16, 32, 64}) {
    if (k <= m && m % k == 0) sizes.push_back(k);
  }
  if (sizes.empty()) sizes.push_back(m);
  return sizes;
}

std::vector<GalerkinModel> nested_models(Ctx& ctx) {
  const GalerkinModel& full = ctx.ensure_model();
  std::vector<GalerkinModel> models;
  for (int k : nested_sizes(full.m())) {
    if (k == full.m()) {
      models.push_back(full);
    } else {
      std::vector<int> idx;
      for (int i = 0; i < full.m(); i += full.m() / k) idx.push_back(i);
      models.push_back(submodel(full, idx));
    }
  }
  return models;
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

struct StageOutcome {
  std::vector<StageArtifact> artifacts;
  bool checks_pass = true;
};

StageOutcome stage_belov(Ctx& ctx) {
  const BelovReport rep = belov_check(BelovParams::paper(), 20);
  StageOutcome out;
  out.artifacts.push_back(ctx.write("belov.json", rep.to_json()));
  out.checks_pass = rep.all_pass;
  return out;
}

StageOutcome stage_cantor(Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  const LevelSetCover cover = cover_gamma_level_set(
      cfg.truncation, cfg.delta, cfg.resolution, cfg.bits);
  ctx.tree = std::make_unique<CantorTree>(build_cantor(cover, cfg.depth));
  const CantorAudit audit = audit_cantor_tree(*ctx.tree);

  // Straight-line gap geometry against the closed form, and integrability
  // drift between the two deepest even depths.
  const double straight_q = straight_gap_quadrature(0.1, 2.0 / 3.0);
  const double straight_c = straight_gap_closed_form(0.1, 2.0 / 3.0);
  const double straight_rel =
      std::abs(straight_q - straight_c) / std::abs(straight_c);
  double drift = 0.0, total_deep = 0.0, total_shallow = 0.0;
  if (cfg.depth >= 3) {
    const CantorTree shallow = build_cantor(cover, cfg.depth - 2);
    total_deep = integrability_report(*ctx.tree, 2.0 / 3.0).total;
    total_shallow = integrability_report(shallow, 2.0 / 3.0).total;
    drift = std::abs(total_deep - total_shallow) / std::abs(total_deep);
  }

  json j;
  j["com1_nesting"] = audit.com1_nesting;
  j["com2_ordering"] = audit.com2_ordering;
  j["com3_shrinkage"] = audit.com3_shrinkage;
  j["gap_measure_collapse"] = audit.gap_measure_collapse;
  j["worst_shrinkage_ratio"] = audit.worst_shrinkage_ratio;
  j["straight_gap_rel_err"] = straight_rel;
  j["integrability_deep"] = total_deep;
  j["integrability_shallow"] = total_shallow;
  j["integrability_drift"] = drift;

  StageOutcome out;
  out.artifacts.push_back(
      ctx.write("tree.json", cantor_tree_to_json(*ctx.tree).dump()));
  out.artifacts.push_back(ctx.write("cantor_audit.json", j.dump(2)));
  out.checks_pass = audit.all() && straight_rel <= 1e-12 && drift < 0.01;
  return out;
}

StageOutcome stage_identities(Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  const CantorTree& tree = ctx.ensure_tree();
  const FunctionField& f = ctx.ensure_field();
  IdentityVerifier ver(f, default_cell_cap(f) * cfg.cell_cap_scale,
                       cfg.mesh_levels);
  const auto lambdas = default_lambdas(tree, cfg.lambda_checks);

  const double analytic_tol =
      cfg.delta + std::pow(8.0, 1 - cfg.truncation) / 7.0 + 1e-9;
  double worst_analytic = 0.0, worst_direct = 0.0;
  bool direct_in_bars = true;

  std::ostringstream csv;
  csv << "lambda_hex,identity,target_re,target_im,measured_re,measured_im,"
         "residual,error_bar,path\n";
  for (const BinaryAngle& lam : lambdas) {
    const auto recs = ver.verify(lam);
    for (const IdentityRecord& r : recs) {
      csv << lam.to_hex() << ',' << r.id << ',' << fmt(r.target.real()) << ','
          << fmt(r.target.imag()) << ',' << fmt(r.analytic.real()) << ','
          << fmt(r.analytic.imag()) << ',' << fmt(r.analytic_residual) << ','
          << fmt(r.analytic_bar) << ",analytic\n";
      csv << lam.to_hex() << ',' << r.id << ',' << fmt(r.target.real()) << ','
          << fmt(r.target.imag()) << ',' << fmt(r.direct.real()) << ','
          << fmt(r.direct.imag()) << ',' << fmt(r.direct_residual) << ','
          << fmt(r.direct_bar) << ",direct\n";
      worst_analytic = std::max(worst_analytic, r.analytic_residual);
      worst_direct = std::max(worst_direct, r.direct_residual);
      if (r.direct_residual > r.analytic_residual + r.direct_bar) {
        direct_in_bars = false;
      }
    }
  }

  // Pointwise multiplication-operator identity at scattered circle points.
  std::vector<BinaryAngle> samples;
  for (int k = 0; k < 256; ++k) {
    samples.push_back(BinaryAngle::from_fraction(2 * k + 1, 512, cfg.bits));
  }
  double uhl = 0.0;
  uhl = std::max(uhl, verify_uhl(f, lambdas[0].to_complex(), samples));
  uhl = std::max(uhl, verify_uhl(f, cplx(2.0, 0.0), samples));
  uhl = std::max(uhl, verify_uhl(f, cplx(0.36, -0.48), samples));

  double eig_gap = 0.0;
  for (std::size_t i = 0; i < lambdas.size() && i < 4; ++i) {
    eig_gap = std::max(
        eig_gap, eigen_identity_check(f, ver.mesh(), lambdas[i]).rel_gap);
  }

  json j;
  j["lambda_count"] = (int)lambdas.size();
  j["analytic_tolerance"] = analytic_tol;
  j["worst_analytic_residual"] = worst_analytic;
  j["worst_direct_residual"] = worst_direct;
  j["direct_within_bars"] = direct_in_bars;
  j["uhl_max_relative"] = uhl;
  j["eigen_identity_max_rel_gap"] = eig_gap;

  StageOutcome out;
  out.artifacts.push_back(ctx.write("identities.csv", csv.str()));
  out.artifacts.push_back(ctx.write("identities_summary.json", j.dump(2)));
  out.checks_pass = worst_analytic <= analytic_tol && worst_direct <= 5e-2 &&
                    direct_in_bars && uhl <= 1e-14 && eig_gap <= 1e-10;
  return out;
}

StageOutcome stage_model(Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  const CantorTree& tree = ctx.ensure_tree();
  const FunctionField& f = ctx.ensure_field();
  const GapMesh& mesh = ctx.ensure_gram_mesh();
  ctx.model = std::make_unique<GalerkinModel>(
      build_model(f, mesh, default_lambdas(tree, cfg.m)));
  const GalerkinModel& model = *ctx.model;

  // In-model eigenvector residuals: frame coordinates of h_lambda_j are the
  // columns of W^H G, and T acts on them as multiplication by lambda_j.
  std::ostringstream csv;
  csv << "lambda_hex,residual\n";
  const MatrixXcd coords = model.frame.adjoint() * model.gram;
  double worst_res = 0.0;
  for (int jj = 0; jj < model.m(); ++jj) {
    const VectorXcd c = coords.col(jj);
    const double res =
        (model.T_mat * c - model.lambda_points(jj) * c).norm() / c.norm();
    worst_res = std::max(worst_res, res);
    csv << model.lambdas[(std::size_t)jj].to_hex() << ',' << fmt(res) << '\n';
  }

  bool hyperplanes_ok = true;
  std::string hyperplane_error;
  try {
    (void)hyperplanes(model);
  } catch (const HyperplaneDegenerate& e) {
    hyperplanes_ok = false;
    hyperplane_error = e.what();
  }

  json j;
  j["m"] = model.m();
  j["rank"] = model.rank;
  j["condition"] = model.condition;
  j["norm_h"] = model.norm_h;
  j["norm_uinv_h"] = model.norm_uinv_h;
  j["res_h"] = model.res_h;
  j["res_uinv_h"] = model.res_uinv_h;
  j["worst_eigen_residual"] = worst_res;
  j["hyperplanes_ok"] = hyperplanes_ok;
  j["hyperplane_error"] = hyperplane_error;

  StageOutcome out;
  out.artifacts.push_back(ctx.write("model.json", model_to_json(model).dump()));
  out.artifacts.push_back(ctx.write("membership.json", j.dump(2)));
  out.artifacts.push_back(ctx.write("eigen_residuals.csv", csv.str()));
  out.checks_pass =
      model.rank == model.m() && hyperplanes_ok && worst_res <= 1e-10 &&
      std::abs(model.norm_h - model.norm_uinv_h) <= 1e-12 * model.norm_h;
  return out;
}

StageOutcome stage_decompose(Ctx& ctx) {
  const std::vector<GalerkinModel> models = nested_models(ctx);
  json per_m = json::array();
  bool pass = true;
  for (const GalerkinModel& model : models) {
    json entry;
    entry["m"] = model.m();
    try {
      const Splitting te = lemma_te_split(model);
      entry["te"] = audit_to_json(audit_splitting(te, model));
      const Splitting co = contraction_split(model);
      entry["contraction"] = audit_to_json(audit_splitting(co, model));
    } catch (const Error& e) {
      entry["error"] = e.what();
      pass = false;
    }
    per_m.push_back(std::move(entry));
  }
  StageOutcome out;
  out.artifacts.push_back(
      ctx.write("decomp.json", json{{"models", per_m}}.dump(2)));
  out.checks_pass = pass;
  return out;
}

StageOutcome stage_orbit(Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  const std::vector<GalerkinModel> models = nested_models(ctx);
  std::vector<const GalerkinModel*> mp;
  for (const auto& m : models) mp.push_back(&m);
  const auto rows = eigen_crowding_report(mp, cfg.orbit_steps, cfg.orbit_eps,
                                          cfg.n_seeds, cfg.seed);

  std::ostringstream csv;
  csv << "m,condition,min_separation,lognorm_var_T,lognorm_var_V,"
         "coverage_p1,coverage_p2,coverage_p3\n";
  for (const CrowdingRow& r : rows) {
    csv << r.m << ',' << fmt(r.condition) << ',' << fmt(r.min_separation)
        << ',' << fmt(r.lognorm_variance_T) << ','
        << fmt(r.lognorm_variance_V);
    for (int d = 0; d < 3; ++d) {
      csv << ','
          << ((std::size_t)d < r.coverage.size() ? fmt(r.coverage[(std::size_t)d])
                                                 : std::string("nan"));
    }
    csv << '\n';
  }

  // Hard surrogates: unitary norm preservation and the Weyl oracle.
  const GalerkinModel& full = models.back();
  const Splitting split = lemma_te_split(full);
  const OrbitRun vrun =
      run_orbit(split.V, random_unit_vector(full.rank, cfg.seed), 10000,
                default_directions(full.rank, cfg.seed));
  MatrixXcd rot(1, 1);
  rot(0, 0) = std::polar(1.0, 2.0 * std::numbers::pi / std::numbers::sqrt2);
  const VectorXcd one = VectorXcd::Ones(1);
  OrbitOptions wopts;
  wopts.eps = cfg.orbit_eps;
  const OrbitRun weyl = run_orbit(rot, one, 100000, {one}, wopts);
  double weyl_cov = weyl.coverage.empty() ? 0.0 : weyl.coverage[0];

  // Trends: T-orbit log-norm variance strictly above V's for m >= 8, and
  // per-projection coverage non-decreasing over m in {8, 16, 32}.
  bool variance_ok = true;
  for (const CrowdingRow& r : rows) {
    if (r.m >= 8 && !(r.lognorm_variance_T > r.lognorm_variance_V)) {
      variance_ok = false;
    }
  }
  int nondecreasing = 0;
  int directions_checked = 0;
  {
    std::vector<const CrowdingRow*> trend_rows;
    for (const CrowdingRow& r : rows) {
      if (r.m == 8 || r.m == 16 || r.m == 32) trend_rows.push_back(&r);
    }
    if (trend_rows.size() >= 2) {
      directions_checked = 3;
      for (int d = 0; d < 3; ++d) {
        bool ok = true;
        for (std::size_t i = 1; i < trend_rows.size(); ++i) {
          const auto& prev = trend_rows[i - 1]->coverage;
          const auto& cur = trend_rows[i]->coverage;
          if ((std::size_t)d >= prev.size() || (std::size_t)d >= cur.size() ||
              cur[(std::size_t)d] < prev[(std::size_t)d]) {
            ok = false;
            break;
          }
        }
        if (ok) ++nondecreasing;
      }
    }
  }
  const bool coverage_trend_ok = directions_checked == 0 || nondecreasing >= 2;
  const bool drift_ok = vrun.max_lognorm_dev <= 1e-5;
  const bool weyl_ok = weyl_cov >= 0.95;

  json j;
  j["v_orbit_max_lognorm_dev"] = vrun.max_lognorm_dev;
  j["weyl_coverage"] = weyl_cov;
  j["variance_T_exceeds_V"] = variance_ok;
  j["coverage_nondecreasing_directions"] = nondecreasing;
  j["coverage_trend_ok"] = coverage_trend_ok;
  j["hard_checks_pass"] = drift_ok && weyl_ok && variance_ok;
  j["density_surrogate_half"] = density_surrogate(full, 0.5, cfg.seed);
  j["density_surrogate_full"] = density_surrogate(full, 1.0, cfg.seed);

  StageOutcome out;
  out.artifacts.push_back(ctx.write("crowding.csv", csv.str()));
  out.artifacts.push_back(ctx.write("trends.json", j.dump(2)));
  // Trend regressions are exit-code visible but do not fail the stage.
  out.checks_pass = drift_ok && weyl_ok && variance_ok;
  return out;
}

using StageFn = StageOutcome (*)(Ctx&);

struct StageDef {
  const char* name;
  StageFn fn;
  std::vector<std::string> inputs;                      // artifact dependencies
  std::string (*relevant)(const PipelineConfig& cfg);   // config subset
};

std::string keys_cantor(const PipelineConfig& c) {
  std::ostringstream o;
  o << c.truncation << '|' << c.bits << '|' << c.delta << '|' << c.resolution
    << '|' << c.depth;
  return o.str();
}

std::string keys_identities(const PipelineConfig& c) {
  std::ostringstream o;
  o << keys_cantor(c) << '|' << c.quad_terms << '|' << c.mesh_levels << '|'
    << c.cell_cap_scale << '|' << c.lambda_checks;
  return o.str();
}

std::string keys_model(const PipelineConfig& c) {
  std::ostringstream o;
  o << keys_cantor(c) << '|' << c.quad_terms << '|' << c.mesh_levels << '|'
    << c.cell_cap_scale << '|' << c.m;
  return o.str();
}

std::string keys_orbit(const PipelineConfig& c) {
  std::ostringstream o;
  o << keys_model(c) << '|' << c.orbit_steps << '|' << c.orbit_eps << '|'
    << c.n_seeds << '|' << c.seed;
  return o.str();
}

const std::vector<StageDef>& stage_defs() {
  static const std::vector<StageDef> defs = {
      {"belov-check", stage_belov, {}, [](const PipelineConfig&) {
         return std::string("paper");
       }},
      {"build-cantor", stage_cantor, {}, keys_cantor},
      {"verify-identities", stage_identities, {"tree.json"}, keys_identities},
      {"build-model", stage_model, {"tree.json"}, keys_model},
      {"decompose", stage_decompose, {"model.json"}, keys_model},
      {"orbit", stage_orbit, {"model.json"}, keys_orbit},
  };
  return defs;
}

}  // namespace

// ---------------------------------------------------------------------------
// Pipeline driver
// ---------------------------------------------------------------------------

PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::string& through) {
  config.validate();
  PipelineResult result;
  Ctx ctx{config, fs::path(config.out_dir), nullptr, nullptr, nullptr, nullptr};
  fs::create_directories(ctx.out);

  RunManifest previous;
  {
    const fs::path mp = ctx.out / "manifest.json";
    if (fs::exists(mp)) {
      try {
        std::ifstream in(mp);
        json j;
        in >> j;
        previous = RunManifest::from_json(j);
      } catch (...) {
        previous = RunManifest{};
      }
    }
  }

  result.manifest.config_hash = content_hash(print_config(config));
  bool halted = false;
  for (const StageDef& def : stage_defs()) {
    StageRecord rec;
    rec.name = def.name;
    if (halted) {
      rec.status = "not run";
      rec.checks_pass = false;
      result.manifest.stages.push_back(std::move(rec));
      continue;
    }

    std::string key_material = std::string(def.name) + "|" +
                               def.relevant(config) + "|" + kToolVersion;
    for (const std::string& input : def.inputs) {
      key_material += "|" + file_hash((ctx.out / input).string());
    }
    rec.cache_key = content_hash(key_material);

    // Cache check: same key, and every artifact still present with the
    // recorded content hash.
    const StageRecord* prev = nullptr;
    for (const StageRecord& p : previous.stages) {
      if (p.name == rec.name) prev = &p;
    }
    bool cached = prev && prev->cache_key == rec.cache_key &&
                  (prev->status == "ok" || prev->status == "cached") &&
                  !prev->artifacts.empty();
    if (cached) {
      for (const StageArtifact& a : prev->artifacts) {
        if (file_hash((ctx.out / a.path).string()) != a.hash) cached = false;
      }
    }

    const auto t0 = std::chrono::steady_clock::now();
    if (cached) {
      rec.status = "cached";
      rec.checks_pass = prev->checks_pass;
      rec.artifacts = prev->artifacts;
    } else {
      try {
        StageOutcome so = def.fn(ctx);
        rec.status = "ok";
        rec.checks_pass = so.checks_pass;
        rec.artifacts = std::move(so.artifacts);
      } catch (const std::exception& e) {
        rec.status = "failed";
        rec.checks_pass = false;
        rec.error = e.what();
        halted = true;
        result.checks_pass = false;
      }
    }
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (!rec.checks_pass && rec.status != "failed") result.checks_pass = false;
    result.manifest.stages.push_back(std::move(rec));
    if (!through.empty() && through == def.name) break;
  }

  // Trend flag comes from the orbit artifact when present.
  {
    const fs::path tp = ctx.out / "trends.json";
    if (fs::exists(tp)) {
      try {
        std::ifstream in(tp);
        json j;
        in >> j;
        result.trends_pass = j.value("coverage_trend_ok", true);
      } catch (...) {
      }
    }
  }

  std::ofstream mo(ctx.out / "manifest.json", std::ios::trunc);
  mo << result.manifest.to_json().dump(2) << "\n";
  return result;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

namespace {

std::optional<json> read_json_artifact(const fs::path& p) {
  if (!fs::exists(p)) return std::nullopt;
  try {
    std::ifstream in(p);
    json j;
    in >> j;
    return j;
  } catch (...) {
    return std::nullopt;
  }
}

}  // namespace

std::string emit_report(const PipelineConfig& config,
                        const RunManifest& manifest) {
  const fs::path out(config.out_dir);
  std::ostringstream md;
  md << "# Pipeline report\n\n"
     << "Tool: " << manifest.tool_version
     << "  \nConfig hash: `" << manifest.config_hash << "`\n\n";

  md << "## Stages\n\n| stage | status | checks | wall time (s) |\n"
     << "|---|---|---|---|\n";
  for (const StageRecord& s : manifest.stages) {
    md << "| " << s.name << " | " << s.status << " | "
       << (s.status == "not run" ? "-" : (s.checks_pass ? "pass" : "FAIL"))
       << " | " << fmt(s.wall_time_s) << " |\n";
  }
  md << "\n";

  if (auto j = read_json_artifact(out / "cantor_audit.json")) {
    md << "## Cantor tree\n\n"
       << "- nesting/ordering/shrinkage/gap-collapse: "
       << (*j)["com1_nesting"].get<bool>() << "/"
       << (*j)["com2_ordering"].get<bool>() << "/"
       << (*j)["com3_shrinkage"].get<bool>() << "/"
       << (*j)["gap_measure_collapse"].get<bool>() << "\n"
       << "- straight-gap closed-form relative error: "
       << fmt((*j)["straight_gap_rel_err"].get<double>())
       << " (artifact: cantor_audit.json)\n"
       << "- integrability drift between depths: "
       << fmt((*j)["integrability_drift"].get<double>()) << "\n\n";
  } else {
    md << "## Cantor tree\n\nnot run\n\n";
  }

  if (auto j = read_json_artifact(out / "identities_summary.json")) {
    md << "## Inner-product identities\n\n"
       << "| quantity | value | tolerance |\n|---|---|---|\n"
       << "| worst analytic residual | "
       << fmt((*j)["worst_analytic_residual"].get<double>()) << " | "
       << fmt((*j)["analytic_tolerance"].get<double>()) << " |\n"
       << "| worst direct residual | "
       << fmt((*j)["worst_direct_residual"].get<double>()) << " | 5e-2 |\n"
       << "| pointwise shift identity (relative) | "
       << fmt((*j)["uhl_max_relative"].get<double>()) << " | 1e-14 |\n"
       << "| eigen-identity agreement (relative) | "
       << fmt((*j)["eigen_identity_max_rel_gap"].get<double>())
       << " | 1e-10 |\n\n"
       << "Per-lambda table: identities.csv (columns: residual, error_bar, "
          "path).\n\n";
  } else {
    md << "## Inner-product identities\n\nnot run\n\n";
  }

  if (auto j = read_json_artifact(out / "membership.json")) {
    md << "## Galerkin model\n\n"
       << "- m = " << (*j)["m"].get<int>() << ", rank = "
       << (*j)["rank"].get<int>() << ", gram condition = "
       << fmt((*j)["condition"].get<double>()) << "\n"
       << "- membership residuals of h / U^{-1}h: "
       << fmt((*j)["res_h"].get<double>()) << " / "
       << fmt((*j)["res_uinv_h"].get<double>()) << "\n"
       << "- worst in-model eigen residual: "
       << fmt((*j)["worst_eigen_residual"].get<double>())
       << " (artifact: eigen_residuals.csv)\n\n";
  } else {
    md << "## Galerkin model\n\nnot run\n\n";
  }

  if (auto j = read_json_artifact(out / "decomp.json")) {
    md << "## Decompositions\n\n"
       << "| m | method | unitarity defect | sigma1(R) | rank excess | "
          "norm A |\n|---|---|---|---|---|---|\n";
    for (const auto& entry : (*j)["models"]) {
      if (entry.contains("error")) {
        md << "| " << entry.value("m", 0) << " | - | error: "
           << entry["error"].get<std::string>() << " | | | |\n";
        continue;
      }
      for (const char* method : {"te", "contraction"}) {
        const auto& a = entry[method];
        md << "| " << entry["m"].get<int>() << " | " << method << " | "
           << fmt(a["unitarity_defect"].get<double>()) << " | "
           << fmt(a["singvals_R"][0].get<double>()) << " | "
           << fmt(a["rank_excess"].get<double>()) << " | "
           << fmt(a["norm_A"].get<double>()) << " |\n";
      }
    }
    md << "\n";
  } else {
    md << "## Decompositions\n\nnot run\n\n";
  }

  if (auto j = read_json_artifact(out / "trends.json")) {
    md << "## Dynamics surrogates\n\n"
       << "- unitary orbit max log-norm deviation (1e4 steps): "
       << fmt((*j)["v_orbit_max_lognorm_dev"].get<double>()) << " (<= 1e-5)\n"
       << "- Weyl oracle coverage: "
       << fmt((*j)["weyl_coverage"].get<double>()) << " (>= 0.95)\n"
       << "- T-orbit variance exceeds V-orbit variance: "
       << ((*j)["variance_T_exceeds_V"].get<bool>() ? "yes" : "NO") << "\n"
       << "- coverage trend non-decreasing directions: "
       << (*j)["coverage_nondecreasing_directions"].get<int>()
       << " of 3 (trend "
       << ((*j)["coverage_trend_ok"].get<bool>() ? "ok" : "FLAGGED")
       << "; per-m table: crowding.csv)\n\n";
  } else {
    md << "## Dynamics surrogates\n\nnot run\n\n";
  }

  const std::string text = md.str();
  std::ofstream o(out / "report.md", std::ios::trunc);
  o << text;
  return text;
}

}  // namespace hcop
