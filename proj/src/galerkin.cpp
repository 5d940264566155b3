#include "hcop/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hcop/errors.hpp"

namespace hcop {

namespace {

constexpr cplx kI{0.0, 1.0};

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

cplx unit(double turns) {
  const double th = 2.0 * std::numbers::pi * turns;
  return {std::cos(th), std::sin(th)};
}

}  // namespace

std::vector<BinaryAngle> default_lambdas(const CantorTree& tree, int m) {
  if (tree.levels.size() < 5) {
    throw ConfigInvalid("default_lambdas: tree shallower than 5 levels");
  }
  const auto& lvl = tree.levels[4];
  std::vector<BinaryAngle> all;
  all.reserve(2 * lvl.size());
  for (const CantorInterval& iv : lvl) {
    all.push_back(iv.a);
    all.push_back(iv.b);
  }
  const int n = (int)all.size();
  if (m < 1 || m > n || n % m != 0) {
    throw ConfigInvalid("default_lambdas: m must divide the endpoint count " +
                        std::to_string(n));
  }
  std::vector<BinaryAngle> out;
  out.reserve(m);
  const int stride = n / m;
  for (int i = 0; i < n; i += stride) out.push_back(all[i]);
  return out;
}

namespace {

// Raw node sums shared by build_model and submodel refactorization.
struct Accumulators {
  MatrixXcd gram;    // Z^H Z over all generators
  VectorXcd bvec;    // <h, gen_i>
  VectorXcd buinv;   // <U^{-1} h, gen_i>
  VectorXcd wh;      // <U h, gen_i>
  cplx h_g = 0.0;    // discrete <h, g>
  double norm2_h = 0.0;
};

Accumulators accumulate(const GapMesh& mesh,
                        const std::vector<BinaryAngle>& lambdas,
                        bool include_h) {
  const int m = (int)lambdas.size();
  const int mm = m + (include_h ? 1 : 0);
  // deltas(i, ep): lambda_i-to-endpoint angle in (-1/2, 1/2] turns; the node
  // chord is reconstructed from deltas + offset so nodes graded 2^-40 into a
  // gap adjacent to lambda_i keep full relative accuracy.
  std::vector<std::vector<double>> deltas(m);
  std::vector<cplx> lam(m);
  for (int i = 0; i < m; ++i) {
    deltas[i] = endpoint_deltas(mesh, lambdas[i]);
    lam[i] = lambdas[i].to_complex();
  }

  Accumulators acc;
  acc.gram = MatrixXcd::Zero(mm, mm);
  acc.bvec = VectorXcd::Zero(mm);
  acc.buinv = VectorXcd::Zero(mm);
  acc.wh = VectorXcd::Zero(mm);

  constexpr std::size_t kBlock = 256;
  const std::size_t nn = mesh.nodes.size();
  MatrixXcd Z(kBlock, mm);
  VectorXcd hb(kBlock), uinv_hb(kBlock), w_hb(kBlock);

  for (std::size_t start = 0; start < nn; start += kBlock) {
    const std::size_t stop = std::min(nn, start + kBlock);
    const int rows = (int)(stop - start);
    for (std::size_t idx = start; idx < stop; ++idx) {
      const MeshNode& nd = mesh.nodes[idx];
      const int row = (int)(idx - start);
      const double d13 = std::cbrt(mesh.node_dist(idx));
      const double sw = std::sqrt(nd.weight);
      const double hv = sw * nd.psi * d13;  // sqrt(weight)-scaled h(w)
      const cplx w = mesh.endpoint_point[nd.endpoint] * unit(nd.offset);
      hb(row) = hv;
      uinv_hb(row) = hv * std::conj(w);
      w_hb(row) = hv * w;
      acc.norm2_h += hv * hv;
      acc.h_g += kI * (nd.weight * nd.psi) * w;  // h conj(g) = i w psi
      for (int i = 0; i < m; ++i) {
        // lambda - w = lambda (1 - e^{2 pi i dt}) = lambda * 2 s (s - i c),
        // s = sin(pi dt), c = cos(pi dt): no cancellation for tiny dt.
        const double dt = deltas[i][(std::size_t)nd.endpoint] + nd.offset;
        const double s = std::sin(std::numbers::pi * dt);
        const double c = std::cos(std::numbers::pi * dt);
        const cplx denom = lam[i] * (2.0 * s * cplx(s, -c));
        Z(row, i) = denom == cplx(0.0) ? cplx(0.0) : hv / denom;
      }
      if (include_h) Z(row, m) = hb(row);
    }
    const auto Zb = Z.topRows(rows);
    acc.gram.noalias() += Zb.adjoint() * Zb;
    acc.bvec.noalias() += Zb.adjoint() * hb.head(rows);
    acc.buinv.noalias() += Zb.adjoint() * uinv_hb.head(rows);
    acc.wh.noalias() += Zb.adjoint() * w_hb.head(rows);
  }
  // Enforce exact Hermitian symmetry of the assembled sums.
  acc.gram = 0.5 * (acc.gram + acc.gram.adjoint()).eval();
  return acc;
}

GalerkinModel finalize(const std::vector<BinaryAngle>& lambdas,
                       bool include_h, Accumulators acc) {
  const int m = (int)lambdas.size();
  const int mm = m + (include_h ? 1 : 0);

  GalerkinModel model;
  model.lambdas = lambdas;
  model.includes_h = include_h;
  model.lambda_points.resize(m);
  for (int i = 0; i < m; ++i) model.lambda_points(i) = lambdas[i].to_complex();
  model.gram = std::move(acc.gram);
  model.norm_h = std::sqrt(acc.norm2_h);
  model.norm_uinv_h = model.norm_h;  // |w| = 1 nodewise

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(model.gram);
  if (es.info() != Eigen::Success) {
    throw QuadratureInconsistency("gram eigendecomposition failed");
  }
  model.gram_eigs = es.eigenvalues();
  const double sigma1 = model.gram_eigs(mm - 1);
  if (!(sigma1 > 0.0)) {
    throw QuadratureInconsistency("gram matrix has no positive direction");
  }
  if (model.gram_eigs(0) < -1e-10 * sigma1) {
    throw QuadratureInconsistency(
        "gram matrix indefinite beyond tolerance: min eigenvalue " +
        std::to_string(model.gram_eigs(0)));
  }
  const double cutoff = 1e-10 * sigma1;
  int first = 0;
  while (first < mm && model.gram_eigs(first) <= cutoff) ++first;
  const int r = mm - first;
  if (r == 0) throw QuadratureInconsistency("gram matrix numerically zero");
  model.rank = r;
  model.condition = sigma1 / model.gram_eigs(first);

  const VectorXd kept = model.gram_eigs.tail(r);
  const MatrixXcd Q = es.eigenvectors().rightCols(r);
  const VectorXd root = kept.cwiseSqrt();
  model.frame = Q * root.cwiseInverse().asDiagonal();  // W = Q Lambda^{-1/2}

  model.b_h = acc.bvec;
  model.b_uinv_h = acc.buinv;
  model.h_coords = model.frame.adjoint() * acc.bvec;
  model.uinv_h_coords = model.frame.adjoint() * acc.buinv;
  model.res_h = std::sqrt(
      std::max(0.0, acc.norm2_h - model.h_coords.squaredNorm()));
  model.res_uinv_h = std::sqrt(
      std::max(0.0, acc.norm2_h - model.uinv_h_coords.squaredNorm()));

  // Forced-coefficient functional <., g>: coefficient 1 on every h_lambda
  // generator, the discrete <h, g> on the appended h generator.
  VectorXcd coef = VectorXcd::Ones(mm);
  if (include_h) coef(m) = acc.h_g;
  model.row_sum = model.frame.transpose() * coef;

  // Compression of multiplication by w.  For the h_lambda columns the node-
  // exact identity w h_lambda = lambda h_lambda - h gives
  // Gu(:, j) = lambda_j gram(:, j) - bvec; the appended-h column is the
  // directly accumulated <U h, gen_i>.
  MatrixXcd Gu(mm, mm);
  for (int j = 0; j < m; ++j) {
    Gu.col(j) = model.lambda_points(j) * model.gram.col(j) - acc.bvec;
  }
  if (include_h) Gu.col(m) = acc.wh;
  model.U_proj = model.frame.adjoint() * Gu * model.frame;

  if (include_h) {
    // T = U + <., g> h with h inside the span: assemble from the compression.
    model.T_mat = model.U_proj + model.h_coords * model.row_sum.transpose();
  } else {
    // Exact similarity transform of diag(lambda): the forced coefficients
    // make T h_lambda = lambda h_lambda an identity of the model.
    const MatrixXcd QD = Q.adjoint() * model.lambda_points.asDiagonal() * Q;
    model.T_mat = root.asDiagonal() * QD * root.cwiseInverse().asDiagonal();
  }
  return model;
}

void check_separation(const std::vector<BinaryAngle>& lambdas, int depth) {
  const double min_sep = 10.0 / factorial(depth);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
      const double sep = chordal_distance(lambdas[i], lambdas[j]);
      if (sep < min_sep) {
        throw ConfigInvalid(
            "build_model: eigenvalue parameters too close: chordal distance " +
            std::to_string(sep) + " < " + std::to_string(min_sep));
      }
    }
  }
}

}  // namespace

GalerkinModel build_model(const FunctionField& field, const GapMesh& mesh,
                          const std::vector<BinaryAngle>& lambdas,
                          bool include_h) {
  if (lambdas.empty()) throw ConfigInvalid("build_model: empty lambda set");
  check_separation(lambdas, field.tree().depth);
  return finalize(lambdas, include_h, accumulate(mesh, lambdas, include_h));
}

GalerkinModel submodel(const GalerkinModel& model,
                       const std::vector<int>& indices) {
  if (model.includes_h) {
    throw ConfigInvalid("submodel: not defined for models with h appended");
  }
  const int k = (int)indices.size();
  if (k == 0) throw ConfigInvalid("submodel: empty index set");
  Accumulators acc;
  acc.gram.resize(k, k);
  acc.bvec.resize(k);
  acc.buinv.resize(k);
  acc.wh = VectorXcd::Zero(k);
  acc.norm2_h = model.norm_h * model.norm_h;
  std::vector<BinaryAngle> lambdas;
  lambdas.reserve((std::size_t)k);
  for (int a = 0; a < k; ++a) {
    const int i = indices[(std::size_t)a];
    if (i < 0 || i >= model.m()) {
      throw ConfigInvalid("submodel: index out of range");
    }
    lambdas.push_back(model.lambdas[(std::size_t)i]);
    acc.bvec(a) = model.b_h(i);
    acc.buinv(a) = model.b_uinv_h(i);
    for (int b = 0; b < k; ++b) {
      acc.gram(a, b) = model.gram(i, indices[(std::size_t)b]);
    }
  }
  return finalize(lambdas, false, std::move(acc));
}

Hyperplanes hyperplanes(const GalerkinModel& model,
                        double h_residual_threshold) {
  if (model.res_h < h_residual_threshold * model.norm_h) {
    throw HyperplaneDegenerate(
        "h lies in the model subspace to within threshold: residual " +
        std::to_string(model.res_h));
  }
  const int mm = (int)model.gram.rows();
  if (model.rank < mm) {
    throw HyperplaneDegenerate(
        "frame is rank-deficient: coefficient functionals are not "
        "well-defined on the span");
  }
  // With full rank the generator-to-frame coordinate map is M = W^H G whose
  // inverse-adjoint is W^H itself (M = Lambda^{1/2} Q^H, W = Q Lambda^{-1/2}),
  // so the unit normal of {sum c_j = 0} is W^H 1 and the normal of
  // {sum d_j / lambda_j = 0} is W^H conj(1/lambda) = W^H lambda.
  Hyperplanes out;
  out.dim = model.m() - 1;
  out.x = model.frame.adjoint() * VectorXcd::Ones(mm);
  VectorXcd rhs = VectorXcd::Ones(mm);
  rhs.head(model.m()) = model.lambda_points;
  out.y = model.frame.adjoint() * rhs;
  out.x.normalize();
  out.y.normalize();
  return out;
}

std::pair<double, double> membership_residuals(const GalerkinModel& model) {
  return {model.res_h, model.res_uinv_h};
}

namespace {

nlohmann::json cmat_to_json(const MatrixXcd& a) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    nlohmann::json rrow = nlohmann::json::array(),
                   irow = nlohmann::json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      rrow.push_back(a(i, j).real());
      irow.push_back(a(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

MatrixXcd cmat_from_json(const nlohmann::json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  const Eigen::Index rows = (Eigen::Index)re.size();
  const Eigen::Index cols = rows > 0 ? (Eigen::Index)re[0].size() : 0;
  MatrixXcd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index jj = 0; jj < cols; ++jj) {
      a(i, jj) = cplx(re[(std::size_t)i][(std::size_t)jj].get<double>(),
                      im[(std::size_t)i][(std::size_t)jj].get<double>());
    }
  }
  return a;
}

}  // namespace

nlohmann::json model_to_json(const GalerkinModel& model) {
  nlohmann::json lam = nlohmann::json::array();
  for (const BinaryAngle& t : model.lambdas) lam.push_back(t.to_hex());
  nlohmann::json j;
  j["lambdas"] = std::move(lam);
  j["lambda_bits"] =
      model.lambdas.empty() ? BinaryAngle::kDefaultBits : model.lambdas[0].bits();
  j["includes_h"] = model.includes_h;
  j["gram"] = cmat_to_json(model.gram);
  j["frame"] = cmat_to_json(model.frame);
  j["T_mat"] = cmat_to_json(model.T_mat);
  j["U_proj"] = cmat_to_json(model.U_proj);
  j["h_coords"] = cmat_to_json(model.h_coords);
  j["uinv_h_coords"] = cmat_to_json(model.uinv_h_coords);
  j["row_sum"] = cmat_to_json(model.row_sum);
  j["b_h"] = cmat_to_json(model.b_h);
  j["b_uinv_h"] = cmat_to_json(model.b_uinv_h);
  j["gram_eigs"] = std::vector<double>(
      model.gram_eigs.data(), model.gram_eigs.data() + model.gram_eigs.size());
  j["norm_h"] = model.norm_h;
  j["norm_uinv_h"] = model.norm_uinv_h;
  j["res_h"] = model.res_h;
  j["res_uinv_h"] = model.res_uinv_h;
  j["condition"] = model.condition;
  j["rank"] = model.rank;
  return j;
}

GalerkinModel model_from_json(const nlohmann::json& j) {
  GalerkinModel model;
  const int bits = j.at("lambda_bits").get<int>();
  for (const auto& hex : j.at("lambdas")) {
    model.lambdas.push_back(
        BinaryAngle::from_hex(hex.get<std::string>(), bits));
  }
  model.lambda_points.resize(model.m());
  for (int i = 0; i < model.m(); ++i) {
    model.lambda_points(i) = model.lambdas[(std::size_t)i].to_complex();
  }
  model.includes_h = j.at("includes_h").get<bool>();
  model.gram = cmat_from_json(j.at("gram"));
  model.frame = cmat_from_json(j.at("frame"));
  model.T_mat = cmat_from_json(j.at("T_mat"));
  model.U_proj = cmat_from_json(j.at("U_proj"));
  model.h_coords = cmat_from_json(j.at("h_coords"));
  model.uinv_h_coords = cmat_from_json(j.at("uinv_h_coords"));
  model.row_sum = cmat_from_json(j.at("row_sum"));
  model.b_h = cmat_from_json(j.at("b_h"));
  model.b_uinv_h = cmat_from_json(j.at("b_uinv_h"));
  const auto eigs = j.at("gram_eigs").get<std::vector<double>>();
  model.gram_eigs =
      Eigen::Map<const VectorXd>(eigs.data(), (Eigen::Index)eigs.size());
  model.norm_h = j.at("norm_h").get<double>();
  model.norm_uinv_h = j.at("norm_uinv_h").get<double>();
  model.res_h = j.at("res_h").get<double>();
  model.res_uinv_h = j.at("res_uinv_h").get<double>();
  model.condition = j.at("condition").get<double>();
  model.rank = j.at("rank").get<int>();
  return model;
}

}  // namespace hcop
