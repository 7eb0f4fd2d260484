#include "eikonal/update.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace eikonal {
namespace {

// Nonnegative binary64 values order the same way as their bit patterns.
std::uint64_t to_bits(double x) noexcept { return std::bit_cast<std::uint64_t>(x); }
double from_bits(std::uint64_t b) noexcept { return std::bit_cast<double>(b); }

constexpr std::uint64_t kInfinityBits = 0x7ff0000000000000ULL;

double naive_unchecked(const StencilInputs& s, double& radicand) noexcept {
  const double r = s.h / s.v;
  const double sum = s.tH + s.tV;
  const double squares = (s.tH * s.tH + s.tV * s.tV) - r * r;
  radicand = sum * sum - 2.0 * squares;
  return (sum + std::sqrt(radicand)) * 0.5;
}

double rearranged_unchecked(const StencilInputs& s, double& radicand) noexcept {
  const double r = s.h / s.v;
  const double diff = s.tH - s.tV;
  radicand = 2.0 * (r * r) - diff * diff;
  return (s.tH + s.tV + std::sqrt(radicand)) * 0.5;
}

// Lowest point of the search; canonicalizes -0.0.
double search_floor(const StencilInputs& s) noexcept { return std::max(s.tH, s.tV) + 0.0; }

void require_finite(const StencilInputs& s) {
  if (!std::isfinite(s.tH) || !std::isfinite(s.tV)) {
    throw std::domain_error("quadratic update needs two finite neighbor times");
  }
}

}  // namespace

std::string_view to_string(UpdateVariant variant) noexcept {
  switch (variant) {
    case UpdateVariant::Naive: return "naive";
    case UpdateVariant::Rearranged: return "rearranged";
    case UpdateVariant::MonotoneRoot: return "monotone";
    case UpdateVariant::NewtonRefined: return "newton";
  }
  return "unknown";
}

UpdateVariant parse_variant(std::string_view name) {
  if (name == "naive") return UpdateVariant::Naive;
  if (name == "rearranged") return UpdateVariant::Rearranged;
  if (name == "monotone") return UpdateVariant::MonotoneRoot;
  if (name == "newton") return UpdateVariant::NewtonRefined;
  throw std::invalid_argument("unknown operator '" + std::string(name) + "'");
}

double one_sided_update(const StencilInputs& s) {
  const double lowest = std::min(s.tH, s.tV);
  if (lowest == kInfinity) throw std::domain_error("one-sided update with no finite neighbor");
  return lowest + s.h / s.v;
}

double quadratic_naive(const StencilInputs& s) {
  require_finite(s);
  double radicand = 0.0;
  const double t = naive_unchecked(s, radicand);
  if (radicand < 0.0) throw std::domain_error("negative radicand in explicit update");
  return t;
}

double quadratic_rearranged(const StencilInputs& s) {
  require_finite(s);
  double radicand = 0.0;
  const double t = rearranged_unchecked(s, radicand);
  if (radicand < 0.0) throw std::domain_error("negative radicand in rearranged update");
  return t;
}

double alpha(double t, const StencilInputs& s) noexcept {
  const double r = s.h / s.v;
  const double a = t - s.tH;
  const double b = t - s.tV;
  return (a * a + b * b) - r * r;
}

double quadratic_monotone(const StencilInputs& s) {
  require_finite(s);
  const double floor = search_floor(s);
  if (alpha(floor, s) >= 0.0) return floor;

  // Invariant: alpha(lo) < 0 <= alpha(hi).
  std::uint64_t lo = to_bits(floor);
  std::uint64_t hi = kInfinityBits;

  // The rearranged formula is within a few ulps of the answer whenever the
  // radicand is sane, so try a tight bracket around it before widening.
  double radicand = 0.0;
  const double guess = rearranged_unchecked(s, radicand);
  constexpr std::uint64_t kSlack = 4;
  std::uint64_t step = kSlack;
  if (radicand >= 0.0 && std::isfinite(guess) && guess >= floor) {
    const std::uint64_t g = to_bits(guess);
    if (g > lo + kSlack && alpha(from_bits(g - kSlack), s) < 0.0) lo = g - kSlack;
    if (alpha(from_bits(g), s) >= 0.0) {
      hi = g;
    } else {
      lo = g;
    }
  }
  while (hi == kInfinityBits) {
    const std::uint64_t probe = kInfinityBits - lo > step ? lo + step : kInfinityBits;
    if (probe == kInfinityBits || alpha(from_bits(probe), s) >= 0.0) {
      hi = probe;
      break;
    }
    lo = probe;
    step *= 2;
  }

  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (alpha(from_bits(mid), s) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return from_bits(hi);
}

double newton_refined(const StencilInputs& s) {
  require_finite(s);
  const double floor = search_floor(s);
  double radicand = 0.0;
  double t = rearranged_unchecked(s, radicand);
  if (!(radicand >= 0.0) || !std::isfinite(t) || t < floor) t = floor;

  for (int k = 0; k < kNewtonIterations; ++k) {
    const double slope = 2.0 * ((t - s.tH) + (t - s.tV));
    if (!(slope > 0.0)) break;
    double next = t - alpha(t, s) / slope;
    if (next < floor) next = floor;
    if (next == t || std::abs(next - t) < std::nextafter(t, kInfinity) - t) {
      t = next;
      break;
    }
    t = next;
  }

  // Directed finish: least t >= floor with alpha(t) >= 0.
  while (t > floor && alpha(std::nextafter(t, 0.0), s) >= 0.0) t = std::nextafter(t, 0.0);
  while (alpha(t, s) < 0.0) t = std::nextafter(t, kInfinity);
  return t;
}

double propose(const StencilInputs& s, UpdateVariant variant) noexcept {
  const double lowest = std::min(s.tH, s.tV);
  if (lowest == kInfinity) return kInfinity;
  const double r = s.h / s.v;
  const double one_sided = lowest + r;
  // An infinite operand makes the difference infinite and selects this branch.
  if (std::abs(s.tH - s.tV) >= r) return one_sided;

  double radicand = 0.0;
  switch (variant) {
    case UpdateVariant::Naive: {
      const double t = naive_unchecked(s, radicand);
      if (radicand < 0.0) return (s.tH + s.tV) * 0.5;
      return t;
    }
    case UpdateVariant::Rearranged: {
      const double t = rearranged_unchecked(s, radicand);
      if (radicand < 0.0) return (s.tH + s.tV) * 0.5;
      return t;
    }
    case UpdateVariant::MonotoneRoot:
      return std::min(quadratic_monotone(s), one_sided);
    case UpdateVariant::NewtonRefined:
      return std::min(newton_refined(s), one_sided);
  }
  return kInfinity;
}

double update_node(const ArrivalGrid& arrivals, const VelocityGrid& velocity, std::size_t i,
                   std::size_t j, UpdateVariant variant) {
  return propose(gather_stencil(arrivals, velocity, i, j), variant);
}

}  // namespace eikonal
