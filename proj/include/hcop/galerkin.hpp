#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <vector>

#include "hcop/eigenfield.hpp"

namespace hcop {

using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;

/// Finite model of the invariant subspace K_m = span{h_{lambda_1..m}}.
///
/// All inner products are node sums over a shared graded mesh, i.e. the model
/// lives on the discrete measure defined by the quadrature; on that measure
/// multiplication by w is exactly unitary and U h_lambda = lambda h_lambda - h
/// holds exactly pointwise, so the structural matrix identities below are
/// exact to rounding rather than to quadrature error.
///
/// gram(i, j) = <h_j, h_i> (column index is the linear argument), so that for
/// u = sum a_i h_i, v = sum b_i h_i one has <u, v> = b^H gram a.  The frame is
/// W = Q_r Lambda_r^{-1/2} over the h_lambda family (E = Z W orthonormal) and
/// T_mat = Lambda_r^{1/2} Q_r^H D Q_r Lambda_r^{-1/2}, a similarity transform
/// of D = diag(lambda) when the frame has full rank.
struct GalerkinModel {
  std::vector<BinaryAngle> lambdas;
  VectorXcd lambda_points;
  MatrixXcd gram;        // m x m
  VectorXd gram_eigs;    // ascending
  MatrixXcd frame;       // W: m x r
  MatrixXcd T_mat;       // r x r
  MatrixXcd U_proj;      // r x r: compression of multiplication by w
  VectorXcd h_coords;       // frame coordinates of P h
  VectorXcd uinv_h_coords;  // frame coordinates of P U^{-1} h
  VectorXcd row_sum;        // s_k = sum_i W(i,k): the <., g> functional on the frame
  VectorXcd b_h;            // raw node sums <h, gen_i>
  VectorXcd b_uinv_h;       // raw node sums <U^{-1} h, gen_i>
  double norm_h = 0.0;       // ||h|| on the discrete measure
  double norm_uinv_h = 0.0;  // = ||h|| exactly (|w| = 1 nodewise)
  double res_h = 0.0;        // || h - P h ||
  double res_uinv_h = 0.0;
  double condition = 1.0;    // over retained directions
  int rank = 0;
  bool includes_h = false;  // test hook: h itself appended to the generators

  int m() const { return (int)lambdas.size(); }
};

/// Tree endpoints used as eigenvalue parameters: the 2^5 level-5 intervals
/// contribute 64 endpoints in tree order; subsampling by a power-of-two stride
/// keeps the sets nested across m = 8, 16, 32, 64.
std::vector<BinaryAngle> default_lambdas(const CantorTree& tree, int m);

/// Builds the model.  Preconditions: lambdas distinct with pairwise chordal
/// separation >= 10/depth! (ConfigInvalid otherwise).  A gram matrix that is
/// indefinite beyond -1e-10 * sigma_1 raises QuadratureInconsistency.
/// `include_h` appends h itself to the spanning family (forcing the
/// h-in-span branch downstream); the last generator is then h.
GalerkinModel build_model(const FunctionField& field, const GapMesh& mesh,
                          const std::vector<BinaryAngle>& lambdas,
                          bool include_h = false);

/// Model on a subset of the h_lambda generators.  The raw node sums slice
/// exactly (the gram of a subset is a principal submatrix), so this redoes
/// only the factorizations — no mesh pass.
GalerkinModel submodel(const GalerkinModel& model,
                       const std::vector<int>& indices);

/// Unit normals of the codimension-1 subspaces
///   X_m = {sum c_j h_j : sum c_j = 0}        (U u stays in K_m)
///   Y_m = {sum d_j h_j : sum d_j/lambda_j = 0}  (U^{-1} v stays in K_m)
/// in frame coordinates.  Requires h detectably outside K_m and a full-rank
/// frame; otherwise HyperplaneDegenerate.
struct Hyperplanes {
  VectorXcd x;  // unit normal of X_m
  VectorXcd y;  // unit normal of Y_m
  int dim = 0;  // m - 1
};

Hyperplanes hyperplanes(const GalerkinModel& model,
                        double h_residual_threshold = 1e-6);

/// Orthogonal-complement residuals of h and U^{-1}h against K_m.
std::pair<double, double> membership_residuals(const GalerkinModel& model);

nlohmann::json model_to_json(const GalerkinModel& model);
GalerkinModel model_from_json(const nlohmann::json& j);

}  // namespace hcop
