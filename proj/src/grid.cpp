#include "hcop/grid.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include "hcop/errors.hpp"

namespace hcop {

namespace {
std::uint64_t next_grid_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}
}  // namespace

std::shared_ptr<Grid> Grid::uniform(int M) {
  if (M < 1) throw Error("Grid::uniform: M must be >= 1");
  auto g = std::make_shared<Grid>();
  g->nodes.reserve(M);
  for (int j = 0; j < M; ++j) g->nodes.push_back(BinaryAngle::from_fraction(j, M));
  g->weights.assign(M, 1.0 / M);
  g->singular.assign(M, 0);
  g->id = next_grid_id();
  return g;
}

GridFunction::GridFunction(std::shared_ptr<const Grid> grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_->size() != values_.size())
    throw GridMismatch("GridFunction: value count does not match grid");
}

cplx inner_product(const GridFunction& f, const GridFunction& g) {
  if (f.grid().id != g.grid().id)
    throw GridMismatch("inner_product: functions sampled on different grids");
  cplx s = 0.0;
  const auto& w = f.grid().weights;
  const auto& fv = f.values();
  const auto& gv = g.values();
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * fv[i] * std::conj(gv[i]);
  return s;
}

void GridFunction::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "angle_hex,re,im,weight,singular_flag\n";
  out.precision(17);
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    out << grid_->nodes[i].to_hex() << ',' << values_[i].real() << ','
        << values_[i].imag() << ',' << grid_->weights[i] << ','
        << int(grid_->singular[i]) << '\n';
  }
}

GridFunction GridFunction::read_csv(const std::string& path, int bits) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  auto grid = std::make_shared<Grid>();
  std::vector<cplx> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string hex, re, im, w, flag;
    std::getline(ss, hex, ',');
    std::getline(ss, re, ',');
    std::getline(ss, im, ',');
    std::getline(ss, w, ',');
    std::getline(ss, flag, ',');
    grid->nodes.push_back(BinaryAngle::from_hex(hex, bits));
    values.emplace_back(std::stod(re), std::stod(im));
    grid->weights.push_back(std::stod(w));
    grid->singular.push_back(char(std::stoi(flag)));
  }
  grid->id = next_grid_id();
  return GridFunction(grid, std::move(values));
}

}  // namespace hcop
