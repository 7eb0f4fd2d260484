#pragma once

// Reference implementations used only by the tests. They share no code with
// the library beyond the grid containers, so agreement is meaningful.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "eikonal/grid.hpp"
#include "eikonal/stencil.hpp"

namespace eikonal::test {

// Root residual written out independently of the library.
inline double ref_alpha(double t, double tH, double tV, double r) {
  const double a = t - tH;
  const double b = t - tV;
  return (a * a + b * b) - r * r;
}

// Larger root of (t - tH)^2 + (t - tV)^2 = r^2 in 80-bit arithmetic.
inline long double extended_root(double tH, double tV, double r) {
  const long double a = tH;
  const long double b = tV;
  const long double rr = static_cast<long double>(r) * r;
  const long double d = a - b;
  const long double disc = 2.0L * rr - d * d;
  if (disc < 0.0L) return std::max(a, b);
  return (a + b + std::sqrt(disc)) / 2.0L;
}

// Least binary64 t >= max(tH, tV) with alpha(t) >= 0, found by scanning every
// double in a window around the extended-precision root. The window is
// doubled until the predicate is false at its lower end (or the lower end is
// the floor) and true at its upper end; inside it the first true value wins.
inline double oracle_monotone_root(const StencilInputs& s) {
  const double r = s.h / s.v;
  const double floor = std::max(s.tH, s.tV) + 0.0;
  if (ref_alpha(floor, s.tH, s.tV, r) >= 0.0) return floor;

  const auto bits = [](double x) { return std::bit_cast<std::uint64_t>(x); };
  const auto value = [](std::uint64_t b) { return std::bit_cast<double>(b); };
  const double estimate = std::max(static_cast<double>(extended_root(s.tH, s.tV, r)), floor);
  const std::uint64_t centre = bits(estimate);
  const std::uint64_t floor_bits = bits(floor);

  for (std::uint64_t half = 32; half < (std::uint64_t{1} << 62); half *= 2) {
    const std::uint64_t lo = centre - floor_bits > half ? centre - half : floor_bits;
    const std::uint64_t hi = centre + half;
    const bool lo_ok = lo == floor_bits || ref_alpha(value(lo), s.tH, s.tV, r) < 0.0;
    if (!lo_ok || ref_alpha(value(hi), s.tH, s.tV, r) < 0.0) continue;
    for (std::uint64_t b = lo; b <= hi; ++b) {
      if (ref_alpha(value(b), s.tH, s.tV, r) >= 0.0) return value(b);
    }
  }
  throw std::logic_error("oracle window did not bracket the root");
}

// Full local update built on the oracle root, with the same branch structure
// as the exact operator: one-sided when |tH - tV| >= r, capped otherwise.
inline double oracle_propose(const StencilInputs& s) {
  const double lowest = std::min(s.tH, s.tV);
  if (std::isinf(lowest)) return kInfinity;
  const double r = s.h / s.v;
  const double one_sided = lowest + r;
  if (std::abs(s.tH - s.tV) >= r) return one_sided;
  return std::min(oracle_monotone_root(s), one_sided);
}

inline StencilInputs stencil_at(const ArrivalGrid& t, const VelocityGrid& v, std::size_t node) {
  const GridShape& g = t.shape();
  return gather_stencil_with(g, [&](std::size_t m) { return t[m]; }, v[node], g.i_of(node), g.j_of(node));
}

// Gauss-Seidel sweeps in index order, plain assignment, until a sweep
// changes nothing.
inline ArrivalGrid gauss_seidel(const VelocityGrid& v, const SeedSet& seeds) {
  ArrivalGrid t = init_arrivals(v.shape(), seeds);
  const auto mask = seed_mask(v.shape(), seeds);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t n = 0; n < t.shape().size(); ++n) {
      if (mask[n]) continue;
      const double next = oracle_propose(stencil_at(t, v, n));
      if (std::bit_cast<std::uint64_t>(next) != std::bit_cast<std::uint64_t>(t[n])) {
        if (next > t[n]) throw std::logic_error("oracle update increased a value");
        t[n] = next;
        changed = true;
      }
    }
  }
  return t;
}

struct RandomOrderRun {
  ArrivalGrid fixed_point;
  std::size_t nontrivial_updates;
};

// Applies nontrivial updates to uniformly chosen active nodes until none is
// left. `update` maps a stencil to a proposed value.
template <class Update, class Rng>
RandomOrderRun random_order_run(const VelocityGrid& v, const SeedSet& seeds, Update&& update, Rng& rng) {
  ArrivalGrid t = init_arrivals(v.shape(), seeds);
  const auto mask = seed_mask(v.shape(), seeds);
  std::size_t steps = 0;
  std::vector<std::size_t> active;
  for (;;) {
    active.clear();
    for (std::size_t n = 0; n < t.shape().size(); ++n) {
      if (!mask[n] && update(stencil_at(t, v, n)) != t[n]) active.push_back(n);
    }
    if (active.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
    const std::size_t n = active[pick(rng)];
    t[n] = update(stencil_at(t, v, n));
    ++steps;
  }
  return {std::move(t), steps};
}

// Independent log-normal speeds around 1.
template <class Rng>
VelocityGrid random_velocity(const GridShape& shape, double sigma, Rng& rng) {
  std::lognormal_distribution<double> dist(0.0, sigma);
  std::vector<double> v(shape.size());
  for (double& x : v) x = dist(rng);
  return VelocityGrid(shape, std::move(v));
}

// `count` distinct random seeds with times in [0, max_t0].
template <class Rng>
SeedSet random_seeds(const GridShape& shape, std::size_t count, double max_t0, Rng& rng) {
  std::vector<std::size_t> nodes(shape.size());
  for (std::size_t n = 0; n < nodes.size(); ++n) nodes[n] = n;
  std::shuffle(nodes.begin(), nodes.end(), rng);
  std::uniform_real_distribution<double> t0(0.0, max_t0);
  SeedSet seeds;
  for (std::size_t k = 0; k < std::min(count, nodes.size()); ++k) {
    seeds.push_back({shape.i_of(nodes[k]), shape.j_of(nodes[k]), max_t0 > 0.0 ? t0(rng) : 0.0});
  }
  return seeds;
}

// Stencil inside the quadratic branch: |tH - tV| < h/v.
template <class Rng>
StencilInputs random_quadratic_stencil(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> exponent(-6, 6);
  const double h = std::ldexp(0.5 + unit(rng), exponent(rng) / 2);
  const double v = std::ldexp(0.5 + unit(rng), exponent(rng));
  const double r = h / v;
  const double base = std::ldexp(unit(rng), exponent(rng) + 4);
  const double gap = r * unit(rng) * 0.999;
  return unit(rng) < 0.5 ? StencilInputs{base, base + gap, v, h} : StencilInputs{base + gap, base, v, h};
}

}  // namespace eikonal::test
