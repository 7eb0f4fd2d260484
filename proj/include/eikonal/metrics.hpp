#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eikonal/grid.hpp"
#include "eikonal/update.hpp"

namespace eikonal {

/// Work-efficiency tallies. A good update sets a node to its final value, an
/// empty one leaves it unchanged and a bad one sets anything else.
struct UpdateCounters {
  std::uint64_t good = 0;
  std::uint64_t empty = 0;
  std::uint64_t bad = 0;
  std::uint64_t total = 0;

  bool balanced() const noexcept { return good + empty + bad == total; }
  UpdateCounters& operator+=(const UpdateCounters& other) noexcept;
  friend bool operator==(const UpdateCounters&, const UpdateCounters&) = default;
};

/// One operator application: the node, its stored value before and after.
struct TraceEntry {
  std::size_t node;
  double old_value;
  double new_value;
};

enum class UpdateKind { Good, Empty, Bad };

/// Relative tolerance used to match final values of the non-exact variants.
inline constexpr double kFinalValueTolerance = 1e-12;

/// Classifies one update against the node's final value. `exact` demands
/// bitwise equality; otherwise a relative tolerance of kFinalValueTolerance
/// applies.
UpdateKind classify_update(double old_value, double new_value, double final_value, bool exact) noexcept;

/// Throws std::invalid_argument if a trace node lies outside the reference.
UpdateCounters classify_updates(std::span<const TraceEntry> trace, const ArrivalGrid& reference, bool exact);

struct ResidualReport {
  double max_rel_error = 0.0;
  std::size_t argmax_node = 0;
  std::size_t argmax_i = 0;
  std::size_t argmax_j = 0;
  UpdateVariant variant = UpdateVariant::MonotoneRoot;
  std::size_t checked_nodes = 0;
};

/// Maximum relative change produced by re-applying the operator at every
/// non-seed node of `solution`. Zero exactly when the solution is a fixed
/// point. When `is_seed` is empty, seeds are taken to be the nodes whose
/// value does not exceed any of their neighbors; such nodes can never be
/// produced by the operator, which always returns more than min(tH, tV).
ResidualReport residual(const ArrivalGrid& solution, const VelocityGrid& velocity, UpdateVariant variant,
                        std::span<const std::uint8_t> is_seed = {});

struct Comparison {
  double max_abs = 0.0;
  double max_rel = 0.0;
  bool bitwise_equal = true;
};

/// Elementwise comparison with +inf == +inf. Throws on shape mismatch.
Comparison compare_solutions(const ArrivalGrid& a, const ArrivalGrid& b);

}  // namespace eikonal
