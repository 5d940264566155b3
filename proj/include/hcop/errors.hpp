#pragma once

#include <stdexcept>
#include <string>

namespace hcop {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested bit shift would push meaningful bits past the angle precision.
struct PrecisionExhausted : Error {
  using Error::Error;
};

// Two grid functions do not share nodes/weights.
struct GridMismatch : Error {
  using Error::Error;
};

// Singular integral refused without a Hölder certificate.
struct MissingHolderCertificate : Error {
  using Error::Error;
};

// Level-set cover came back with no candidate arcs.
struct LevelSetEmpty : Error {
  using Error::Error;
};

// Cantor construction cannot reach the requested depth.
struct DepthUnreachable : Error {
  DepthUnreachable(const std::string& msg, int feasible)
      : Error(msg), max_feasible_depth(feasible) {}
  int max_feasible_depth;
};

struct UnsupportedExponent : Error {
  using Error::Error;
};

// Quadrature cannot reach the requested accuracy at the given mesh.
struct AccuracyUnattainable : Error {
  using Error::Error;
};

// Gram matrix indefinite beyond tolerance.
struct QuadratureInconsistency : Error {
  using Error::Error;
};

// h projects (numerically) into K_m; the hyperplane construction degenerates.
struct HyperplaneDegenerate : Error {
  using Error::Error;
};

struct AuditFailure : Error {
  using Error::Error;
};

struct ConfigInvalid : Error {
  using Error::Error;
};

}  // namespace hcop
