#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "eikonal/stencil.hpp"

namespace eikonal {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dimensions and spacing of a regular 2D grid. Nodes are stored row-major
/// with x varying fastest: index(i, j) = j * nx + i.
class GridShape {
 public:
  GridShape(std::size_t nx, std::size_t ny, double h);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  double h() const noexcept { return h_; }
  std::size_t size() const noexcept { return nx_ * ny_; }

  bool contains(std::size_t i, std::size_t j) const noexcept { return i < nx_ && j < ny_; }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx_ + i; }
  std::size_t i_of(std::size_t idx) const noexcept { return idx % nx_; }
  std::size_t j_of(std::size_t idx) const noexcept { return idx / nx_; }

  friend bool operator==(const GridShape&, const GridShape&) = default;

 private:
  std::size_t nx_;
  std::size_t ny_;
  double h_;
};

/// Axis-adjacent in-range neighbors of a node, in left, right, down, up order.
class Neighbors {
 public:
  const std::size_t* begin() const noexcept { return nodes_.data(); }
  const std::size_t* end() const noexcept { return nodes_.data() + count_; }
  std::size_t size() const noexcept { return count_; }
  std::size_t operator[](std::size_t k) const noexcept { return nodes_[k]; }

  void add(std::size_t node) noexcept { nodes_[count_++] = node; }

 private:
  std::array<std::size_t, 4> nodes_{};
  std::size_t count_ = 0;
};

/// Rejects out-of-range coordinates with std::out_of_range.
Neighbors neighbors(const GridShape& shape, std::size_t i, std::size_t j);

/// Unchecked variant for hot loops; `node` must be a valid linear index.
inline Neighbors neighbors_of(const GridShape& shape, std::size_t node) noexcept {
  const std::size_t nx = shape.nx();
  const std::size_t i = node % nx;
  const std::size_t j = node / nx;
  Neighbors out;
  if (i > 0) out.add(node - 1);
  if (i + 1 < nx) out.add(node + 1);
  if (j > 0) out.add(node - nx);
  if (j + 1 < shape.ny()) out.add(node + nx);
  return out;
}

/// Positive, finite propagation speeds, one per node.
class VelocityGrid {
 public:
  VelocityGrid(GridShape shape, std::vector<double> values);

  const GridShape& shape() const noexcept { return shape_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t idx) const noexcept { return values_[idx]; }
  double at(std::size_t i, std::size_t j) const noexcept { return values_[shape_.index(i, j)]; }
  double max_speed() const noexcept;

 private:
  GridShape shape_;
  std::vector<double> values_;
};

/// Arrival times in [0, +inf]. Solvers mutate the values in place under a
/// decrease-only protocol.
class ArrivalGrid {
 public:
  ArrivalGrid(GridShape shape, std::vector<double> values);
  explicit ArrivalGrid(GridShape shape);

  const GridShape& shape() const noexcept { return shape_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t idx) const noexcept { return values_[idx]; }
  double& operator[](std::size_t idx) noexcept { return values_[idx]; }
  double at(std::size_t i, std::size_t j) const noexcept { return values_[shape_.index(i, j)]; }

 private:
  GridShape shape_;
  std::vector<double> values_;
};

struct Seed {
  std::size_t i;
  std::size_t j;
  double t0;
};

using SeedSet = std::vector<Seed>;

/// Throws std::invalid_argument on out-of-range, duplicate or invalid seeds.
void validate_seeds(const GridShape& shape, const SeedSet& seeds);

/// One byte per node, nonzero where a seed sits.
std::vector<std::uint8_t> seed_mask(const GridShape& shape, const SeedSet& seeds);

/// +inf everywhere except the seeds, which hold their t0.
ArrivalGrid init_arrivals(const GridShape& shape, const SeedSet& seeds);

/// Builds the stencil for node (i, j) reading arrival times through `load`,
/// which maps a linear index to its current value. Missing neighbors at the
/// border contribute +inf.
template <class Load>
StencilInputs gather_stencil_with(const GridShape& shape, Load&& load, double speed,
                                  std::size_t i, std::size_t j) {
  const std::size_t node = shape.index(i, j);
  const std::size_t nx = shape.nx();
  double tH = kInfinity;
  double tV = kInfinity;
  if (i > 0) tH = std::min(tH, load(node - 1));
  if (i + 1 < nx) tH = std::min(tH, load(node + 1));
  if (j > 0) tV = std::min(tV, load(node - nx));
  if (j + 1 < shape.ny()) tV = std::min(tV, load(node + nx));
  return {tH, tV, speed, shape.h()};
}

/// Rejects out-of-range coordinates and mismatched shapes.
StencilInputs gather_stencil(const ArrivalGrid& arrivals, const VelocityGrid& velocity,
                             std::size_t i, std::size_t j);

}  // namespace eikonal
