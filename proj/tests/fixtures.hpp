// Shared lazily-built fixtures for the unit test binary.
//
// The structural identities of the Galerkin model hold exactly on the
// discrete node measure of *any* mesh, so unit tests use a deliberately
// coarse mesh (64x the production cell cap) to keep the binary fast; the
// acceptance suite runs the production parameters.
#pragma once

#include "hcop/cantor.hpp"
#include "hcop/eigenfield.hpp"
#include "hcop/galerkin.hpp"

namespace hcop::testfix {

inline const LevelSetCover& cover() {
  static const LevelSetCover c = cover_gamma_level_set(12, 1e-3, 1 << 20);
  return c;
}

inline const CantorTree& tree() {
  static const CantorTree t = build_cantor(cover(), 8);
  return t;
}

inline const FunctionField& field() {
  static const FunctionField f(tree(), LacunarySeries{}, 2);
  return f;
}

inline const GapMesh& coarse_mesh() {
  static const GapMesh m =
      build_gap_mesh(field(), 64.0 * 0.5 * default_cell_cap(field()));
  return m;
}

inline const GalerkinModel& model64() {
  static const GalerkinModel m =
      build_model(field(), coarse_mesh(), default_lambdas(tree(), 64));
  return m;
}

}  // namespace hcop::testfix
