#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hcop/binary_angle.hpp"

namespace hcop {

using cplx = std::complex<double>;

/// Shared quadrature layout on the circle: nodes (as exact angles), positive
/// weights summing to 1 (normalized Lebesgue measure), and flags marking
/// nodes near a singular locus. Functions sampled on the same Grid instance
/// can be combined; mixing layouts raises GridMismatch.
struct Grid {
  std::vector<BinaryAngle> nodes;  // strictly increasing as angles
  std::vector<double> weights;
  std::vector<char> singular;
  std::uint64_t id = 0;

  std::size_t size() const { return nodes.size(); }
  static std::shared_ptr<Grid> uniform(int M);  // M trapezoid nodes j/M
};

class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::shared_ptr<const Grid> grid, std::vector<cplx> values);

  template <typename F>
  static GridFunction sample(std::shared_ptr<const Grid> grid, F&& f) {
    std::vector<cplx> v;
    v.reserve(grid->size());
    for (const auto& t : grid->nodes) v.push_back(f(t));
    return GridFunction(grid, std::move(v));
  }

  const Grid& grid() const { return *grid_; }
  std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }

  void write_csv(const std::string& path) const;
  static GridFunction read_csv(const std::string& path, int bits = BinaryAngle::kDefaultBits);

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<cplx> values_;
};

// sum_i w_i f(z_i) conj(g(z_i)); throws GridMismatch if layouts differ.
cplx inner_product(const GridFunction& f, const GridFunction& g);

}  // namespace hcop
