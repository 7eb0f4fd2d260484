#include "eikonal/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eikonal {

GridShape::GridShape(std::size_t nx, std::size_t ny, double h) : nx_(nx), ny_(ny), h_(h) {
  if (nx == 0 || ny == 0) throw std::invalid_argument("grid dimensions must be at least 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid spacing must be positive and finite");
  if (ny > std::numeric_limits<std::size_t>::max() / nx) throw std::invalid_argument("grid too large");
}

Neighbors neighbors(const GridShape& shape, std::size_t i, std::size_t j) {
  if (!shape.contains(i, j)) {
    throw std::out_of_range("node (" + std::to_string(i) + ", " + std::to_string(j) + ") outside grid");
  }
  return neighbors_of(shape, shape.index(i, j));
}

VelocityGrid::VelocityGrid(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.size()) throw std::invalid_argument("velocity payload size does not match grid");
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("speeds must be positive and finite");
  }
}

double VelocityGrid::max_speed() const noexcept {
  return *std::max_element(values_.begin(), values_.end());
}

ArrivalGrid::ArrivalGrid(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.size()) throw std::invalid_argument("arrival payload size does not match grid");
  for (double t : values_) {
    if (std::isnan(t) || t < 0.0) throw std::invalid_argument("arrival times must be >= 0 or +inf");
  }
}

ArrivalGrid::ArrivalGrid(GridShape shape) : shape_(shape), values_(shape.size(), kInfinity) {}

void validate_seeds(const GridShape& shape, const SeedSet& seeds) {
  std::vector<std::uint8_t> seen(shape.size(), 0);
  for (const Seed& s : seeds) {
    if (!shape.contains(s.i, s.j)) {
      throw std::invalid_argument("seed (" + std::to_string(s.i) + ", " + std::to_string(s.j) + ") outside grid");
    }
    if (!std::isfinite(s.t0) || s.t0 < 0.0) throw std::invalid_argument("seed times must be finite and >= 0");
    auto& flag = seen[shape.index(s.i, s.j)];
    if (flag) {
      throw std::invalid_argument("duplicate seed (" + std::to_string(s.i) + ", " + std::to_string(s.j) + ")");
    }
    flag = 1;
  }
}

std::vector<std::uint8_t> seed_mask(const GridShape& shape, const SeedSet& seeds) {
  std::vector<std::uint8_t> mask(shape.size(), 0);
  for (const Seed& s : seeds) mask[shape.index(s.i, s.j)] = 1;
  return mask;
}

ArrivalGrid init_arrivals(const GridShape& shape, const SeedSet& seeds) {
  validate_seeds(shape, seeds);
  ArrivalGrid out(shape);
  // -0.0 seeds are stored as +0.0 so bit-level comparisons stay meaningful.
  for (const Seed& s : seeds) out[shape.index(s.i, s.j)] = s.t0 + 0.0;
  return out;
}

StencilInputs gather_stencil(const ArrivalGrid& arrivals, const VelocityGrid& velocity,
                             std::size_t i, std::size_t j) {
  const GridShape& shape = arrivals.shape();
  if (!(shape == velocity.shape())) throw std::invalid_argument("arrival and velocity grids differ in shape");
  if (!shape.contains(i, j)) throw std::out_of_range("stencil node outside grid");
  return gather_stencil_with(
      shape, [&](std::size_t idx) { return arrivals[idx]; }, velocity.at(i, j), i, j);
}

}  // namespace eikonal
