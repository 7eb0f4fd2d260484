#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "eikonal/metrics.hpp"
#include "eikonal/solvers.hpp"
#include "support/oracles.hpp"

using namespace eikonal;

TEST_CASE("classify a single update") {
  CHECK(classify_update(5.0, 5.0, 5.0, true) == UpdateKind::Empty);
  CHECK(classify_update(5.0, 5.0, 1.0, true) == UpdateKind::Empty);
  CHECK(classify_update(kInfinity, kInfinity, 1.0, true) == UpdateKind::Empty);
  CHECK(classify_update(kInfinity, 2.5, 2.5, true) == UpdateKind::Good);
  CHECK(classify_update(kInfinity, 2.0, 1.7, true) == UpdateKind::Bad);
  const double close = 2.5 * (1.0 + 1e-14);
  CHECK(classify_update(kInfinity, close, 2.5, true) == UpdateKind::Bad);
  CHECK(classify_update(kInfinity, close, 2.5, false) == UpdateKind::Good);
  CHECK(classify_update(kInfinity, 2.5 * (1.0 + 1e-10), 2.5, false) == UpdateKind::Bad);
}

TEST_CASE("classify a trace") {
  const ArrivalGrid ref(GridShape(3, 1, 1.0), {0.0, 1.0, 2.0});
  const std::vector<TraceEntry> trace{{1, kInfinity, 1.0}, {2, kInfinity, 3.0}, {2, 3.0, 2.0}, {2, 2.0, 2.0}};
  const UpdateCounters c = classify_updates(trace, ref, true);
  CHECK(c.good == 2);
  CHECK(c.bad == 1);
  CHECK(c.empty == 1);
  CHECK(c.total == 4);
  CHECK(c.balanced());
  const std::vector<TraceEntry> outside{{3, kInfinity, 1.0}};
  CHECK_THROWS_AS(classify_updates(outside, ref, true), std::invalid_argument);

  UpdateCounters sum;
  sum += c;
  sum += c;
  CHECK(sum == UpdateCounters{4, 2, 2, 8});
}

TEST_CASE("sequential FMM trace on the 3x3 point source") {
  // The centre pops first and gives every edge its final value 1. Each edge
  // pop then reaches two corners; the corner's other edge neighbour already
  // holds 1, so the first touch computes the final quadratic value and the
  // second touch is empty. Corner pops change nothing.
  const GridShape g(3, 3, 1.0);
  const VelocityGrid v(g, std::vector<double>(9, 1.0));
  const SeedSet seeds{{1, 1, 0.0}};
  SolveConfig c;
  const ArrivalGrid ref = solve_fmm(v, seeds, c).arrivals;
  c.reference = &ref;
  c.trace = true;
  const SolveResult r = solve_fmm(v, seeds, c);
  REQUIRE(r.stats.has_value());
  CHECK(r.stats->good == 8);
  CHECK(r.stats->empty == 12);
  CHECK(r.stats->bad == 0);
  CHECK(r.stats->total == 20);

  std::map<std::size_t, std::vector<UpdateKind>> per_node;
  for (const TraceEntry& e : r.trace) {
    per_node[e.node].push_back(classify_update(e.old_value, e.new_value, ref[e.node], true));
  }
  for (std::size_t corner : {g.index(0, 0), g.index(2, 0), g.index(0, 2), g.index(2, 2)}) {
    const auto& kinds = per_node[corner];
    REQUIRE(kinds.size() >= 2);
    CHECK(kinds[0] == UpdateKind::Good);
    for (std::size_t k = 1; k < kinds.size(); ++k) CHECK(kinds[k] == UpdateKind::Empty);
  }
  for (std::size_t edge : {g.index(1, 0), g.index(0, 1), g.index(2, 1), g.index(1, 2)}) {
    CHECK(per_node[edge].front() == UpdateKind::Good);
  }
}

TEST_CASE("residual of exact fixed points is zero") {
  const GridShape g(3, 1, 1.0);
  const VelocityGrid v(g, {1.0, 1.0, 1.0});
  const ArrivalGrid chain(g, {0.0, 1.0, 2.0});
  for (auto var : {UpdateVariant::Naive, UpdateVariant::Rearranged, UpdateVariant::MonotoneRoot,
                   UpdateVariant::NewtonRefined}) {
    const ResidualReport rep = residual(chain, v, var);
    CHECK(rep.max_rel_error == 0.0);
    CHECK(rep.checked_nodes == 2);
    CHECK(rep.variant == var);
  }
  const std::vector<std::uint8_t> mask{1, 0, 0};
  CHECK(residual(chain, v, UpdateVariant::MonotoneRoot, mask).max_rel_error == 0.0);
  const std::vector<std::uint8_t> short_mask{1};
  CHECK_THROWS_AS(residual(chain, v, UpdateVariant::MonotoneRoot, short_mask), std::invalid_argument);
  CHECK_THROWS_AS(residual(chain, VelocityGrid(GridShape(3, 1, 2.0), {1.0, 1.0, 1.0}), UpdateVariant::Naive),
                  std::invalid_argument);
}

TEST_CASE("residual locates a corrupted node") {
  std::mt19937_64 rng(41);
  const GridShape g(20, 15, 1.0);
  const VelocityGrid v = test::random_velocity(g, 0.5, rng);
  const SeedSet seeds{{3, 4, 0.0}};
  const auto mask = seed_mask(g, seeds);
  ArrivalGrid t = solve_fmm(v, seeds, SolveConfig{}).arrivals;
  CHECK(residual(t, v, UpdateVariant::MonotoneRoot, mask).max_rel_error == 0.0);
  CHECK(residual(t, v, UpdateVariant::MonotoneRoot).max_rel_error == 0.0);
  t[g.index(11, 7)] *= 0.99;
  const ResidualReport rep = residual(t, v, UpdateVariant::MonotoneRoot, mask);
  CHECK(rep.max_rel_error > 0.0);
  CHECK(rep.argmax_node == g.index(11, 7));
  CHECK(rep.argmax_i == 11);
  CHECK(rep.argmax_j == 7);
}

TEST_CASE("compare solutions") {
  const GridShape g(2, 1, 1.0);
  const ArrivalGrid a(g, {0.0, 1.0});
  const Comparison self = compare_solutions(a, a);
  CHECK(self.max_abs == 0.0);
  CHECK(self.max_rel == 0.0);
  CHECK(self.bitwise_equal);

  const ArrivalGrid b(g, {0.0, 1.0 + std::ldexp(1.0, -52)});
  const Comparison c = compare_solutions(a, b);
  CHECK_FALSE(c.bitwise_equal);
  CHECK(c.max_rel > 0.0);
  CHECK(c.max_rel < 1e-15);

  const ArrivalGrid far(g);
  CHECK(compare_solutions(far, far).bitwise_equal);
  CHECK(compare_solutions(far, far).max_abs == 0.0);
  CHECK(compare_solutions(a, far).max_abs == kInfinity);
  CHECK_THROWS_AS(compare_solutions(a, ArrivalGrid(GridShape(1, 2, 1.0))), std::invalid_argument);
}
