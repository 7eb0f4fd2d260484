#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "eikonal/grid.hpp"

namespace eikonal {

/// Contents of a grid file: magic "EIKG", u32 version 1, u64 nx, u64 ny,
/// f64 h, then nx*ny f64 values row-major, all little-endian.
struct GridFile {
  GridShape shape;
  std::vector<double> values;
};

inline constexpr std::uint32_t kGridFileVersion = 1;

void write_grid(std::ostream& out, const GridShape& shape, std::span<const double> values);
void write_grid_file(const std::filesystem::path& path, const GridShape& shape, std::span<const double> values);
/// Throws std::runtime_error on a malformed or truncated file.
GridFile read_grid(std::istream& in);
GridFile read_grid_file(const std::filesystem::path& path);

VelocityGrid read_velocity_file(const std::filesystem::path& path);
ArrivalGrid read_arrival_file(const std::filesystem::path& path);

/// Seeds as CSV with header "i,j,t0". Throws std::runtime_error on parse errors.
SeedSet read_seeds(std::istream& in);
SeedSet read_seeds_file(const std::filesystem::path& path);
void write_seeds(std::ostream& out, const SeedSet& seeds);

/// binary64 with 17 significant digits, '.' decimal point, no locale.
std::string format_double(double x);

/// Velocity field generators. All throw std::invalid_argument on
/// non-positive speeds or spacing.
VelocityGrid make_constant(const GridShape& shape, double speed);
/// Alternating square cells of `cell` nodes with speeds `slow` and `fast`.
VelocityGrid make_checkerboard(const GridShape& shape, double slow, double fast, std::size_t cell);
/// Independent per-node speeds median * exp(sigma * z), z standard normal.
VelocityGrid make_lognormal(const GridShape& shape, double median, double sigma, std::uint64_t rng_seed);

}  // namespace eikonal
