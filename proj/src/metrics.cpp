#include "eikonal/metrics.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eikonal {

namespace {

double relative_difference(double a, double b) noexcept {
  if (a == b) return 0.0;
  if (std::isinf(a) || std::isinf(b)) return kInfinity;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) / std::max(scale, std::numeric_limits<double>::min());
}

bool looks_like_seed(const ArrivalGrid& solution, std::size_t node) {
  const double t = solution[node];
  for (std::size_t m : neighbors_of(solution.shape(), node)) {
    if (solution[m] < t) return false;
  }
  return true;
}

}  // namespace

UpdateCounters& UpdateCounters::operator+=(const UpdateCounters& other) noexcept {
  good += other.good;
  empty += other.empty;
  bad += other.bad;
  total += other.total;
  return *this;
}

UpdateKind classify_update(double old_value, double new_value, double final_value, bool exact) noexcept {
  if (std::bit_cast<std::uint64_t>(old_value) == std::bit_cast<std::uint64_t>(new_value)) return UpdateKind::Empty;
  if (exact) return new_value == final_value ? UpdateKind::Good : UpdateKind::Bad;
  return relative_difference(new_value, final_value) <= kFinalValueTolerance ? UpdateKind::Good : UpdateKind::Bad;
}

UpdateCounters classify_updates(std::span<const TraceEntry> trace, const ArrivalGrid& reference, bool exact) {
  UpdateCounters out;
  for (const TraceEntry& e : trace) {
    if (e.node >= reference.shape().size()) throw std::invalid_argument("trace node outside reference grid");
    switch (classify_update(e.old_value, e.new_value, reference[e.node], exact)) {
      case UpdateKind::Good: ++out.good; break;
      case UpdateKind::Empty: ++out.empty; break;
      case UpdateKind::Bad: ++out.bad; break;
    }
    ++out.total;
  }
  return out;
}

ResidualReport residual(const ArrivalGrid& solution, const VelocityGrid& velocity, UpdateVariant variant,
                        std::span<const std::uint8_t> is_seed) {
  const GridShape& shape = solution.shape();
  if (!(shape == velocity.shape())) throw std::invalid_argument("solution and velocity grids differ in shape");
  if (!is_seed.empty() && is_seed.size() != shape.size()) throw std::invalid_argument("seed mask size mismatch");

  ResidualReport report;
  report.variant = variant;
  for (std::size_t node = 0; node < shape.size(); ++node) {
    const bool seed = is_seed.empty() ? looks_like_seed(solution, node) : is_seed[node] != 0;
    if (seed) continue;
    ++report.checked_nodes;
    const std::size_t i = shape.i_of(node);
    const std::size_t j = shape.j_of(node);
    const double stored = solution[node];
    const double recomputed = propose(
        gather_stencil_with(shape, [&](std::size_t m) { return solution[m]; }, velocity[node], i, j), variant);
    double err = 0.0;
    if (stored != recomputed) {
      err = std::isinf(stored) || std::isinf(recomputed)
                ? kInfinity
                : std::abs(recomputed - stored) / std::max(stored, std::numeric_limits<double>::min());
    }
    if (err > report.max_rel_error) {
      report.max_rel_error = err;
      report.argmax_node = node;
      report.argmax_i = i;
      report.argmax_j = j;
    }
  }
  return report;
}

Comparison compare_solutions(const ArrivalGrid& a, const ArrivalGrid& b) {
  if (!(a.shape() == b.shape())) throw std::invalid_argument("compared grids differ in shape");
  Comparison out;
  for (std::size_t n = 0; n < a.shape().size(); ++n) {
    const double x = a[n];
    const double y = b[n];
    if (std::bit_cast<std::uint64_t>(x) != std::bit_cast<std::uint64_t>(y)) out.bitwise_equal = false;
    if (x == y) continue;
    const double abs_diff = std::isinf(x) || std::isinf(y) ? kInfinity : std::abs(x - y);
    out.max_abs = std::max(out.max_abs, abs_diff);
    out.max_rel = std::max(out.max_rel, relative_difference(x, y));
  }
  return out;
}

}  // namespace eikonal
