#pragma once

#include <cstddef>
#include <string_view>

#include "eikonal/grid.hpp"
#include "eikonal/stencil.hpp"

namespace eikonal {

/// Finite-precision realizations of the quadratic branch of the upwind update.
enum class UpdateVariant {
  Naive,          // explicit formula, squares expanded
  Rearranged,     // explicit formula with the radicand written as 2(h/v)^2 - (tH - tV)^2
  MonotoneRoot,   // least binary64 t with alpha(t) >= 0, bit-exact and monotone
  NewtonRefined,  // Newton on alpha from the rearranged guess, then ulp-walked
};

std::string_view to_string(UpdateVariant variant) noexcept;
/// Accepts naive, rearranged, monotone, newton. Throws std::invalid_argument.
UpdateVariant parse_variant(std::string_view name);

/// True for variants whose output is the exact monotone rounding.
inline bool is_exact(UpdateVariant variant) noexcept {
  return variant == UpdateVariant::MonotoneRoot || variant == UpdateVariant::NewtonRefined;
}

/// min(tH, tV) + h/v. Throws std::domain_error when both inputs are +inf.
double one_sided_update(const StencilInputs& s);

/// (tH + tV + sqrt((tH + tV)^2 - 2 (tH^2 + tV^2 - (h/v)^2))) / 2, evaluated
/// left to right. Throws std::domain_error on a negative radicand.
double quadratic_naive(const StencilInputs& s);

/// (tH + tV + sqrt(2 (h/v)^2 - (tH - tV)^2)) / 2, evaluated left to right.
/// Throws std::domain_error on a negative radicand.
double quadratic_rearranged(const StencilInputs& s);

/// Root residual (t - tH)^2 + (t - tV)^2 - (h/v)^2 in binary64. For
/// t >= max(tH, tV) it is nondecreasing in t and nonincreasing in tH and tV,
/// rounding included.
double alpha(double t, const StencilInputs& s) noexcept;

/// The least binary64 r >= max(tH, tV) with alpha(r) >= 0. Monotone in tH and
/// tV under binary64 arithmetic. Requires finite tH and tV.
double quadratic_monotone(const StencilInputs& s);

/// Newton iteration on alpha = 0 started from the rearranged formula, capped
/// at kNewtonIterations steps and finished by an ulp walk to the least r with
/// alpha(r) >= 0. Requires finite tH and tV.
double newton_refined(const StencilInputs& s);

inline constexpr int kNewtonIterations = 8;

/// Full local upwind update, proposed without committing anything:
/// +inf when both inputs are +inf, the one-sided value when
/// |tH - tV| >= h/v, otherwise the selected quadratic.
///
/// For the exact variants the quadratic result is additionally capped at the
/// one-sided value. The real root never exceeds min(tH, tV) + h/v inside the
/// quadratic branch, and the cap keeps the composed operator monotone across
/// the branch switch. The explicit variants clamp a negative radicand to zero
/// instead of failing.
double propose(const StencilInputs& s, UpdateVariant variant) noexcept;

/// propose() applied to the stencil of node (i, j).
double update_node(const ArrivalGrid& arrivals, const VelocityGrid& velocity, std::size_t i,
                   std::size_t j, UpdateVariant variant);

}  // namespace eikonal
