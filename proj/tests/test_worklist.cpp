#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "eikonal/worklist.hpp"

using namespace eikonal;

TEST_CASE("bin_of") {
  CHECK(bin_of(3.7, 0.5) == 7);
  CHECK(bin_of(0.0, 0.5) == 0);
  CHECK(bin_of(0.0, 1e-300) == 0);
  CHECK(bin_of(0.0, 1e300) == 0);
  CHECK(bin_of(1.0, 1.0) == 1);
  CHECK_THROWS_AS(bin_of(INFINITY, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bin_of(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bin_of(NAN, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bin_of(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bin_of(1.0, -1.0), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<double> ts(10000);
  for (double& t : ts) t = u(rng);
  std::sort(ts.begin(), ts.end());
  for (std::size_t k = 1; k < ts.size(); ++k) CHECK(bin_of(ts[k - 1], 0.37) <= bin_of(ts[k], 0.37));
}

TEST_CASE("construction rejects zero chunk size or thread count") {
  CHECK_THROWS_AS(SoftPriorityWorklist(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(SoftPriorityWorklist(1, 0), std::invalid_argument);
  SoftPriorityWorklist wl(4, 2);
  CHECK_THROWS_AS(wl.handle(2), std::out_of_range);
  CHECK_THROWS_AS(wl.run_until_quiescent([](WorkItem, SoftPriorityWorklist::Handle&) {}, 3), std::invalid_argument);
  CHECK_THROWS_AS(wl.run_until_quiescent([](WorkItem, SoftPriorityWorklist::Handle&) {}, 0), std::invalid_argument);
}

TEST_CASE("single-thread push and pop") {
  SoftPriorityWorklist wl(64, 1);
  auto h = wl.handle(0);
  CHECK_FALSE(h.pop().has_value());

  h.push({42, 3});
  const auto item = h.pop();
  REQUIRE(item.has_value());
  CHECK(*item == WorkItem{42, 3});
  CHECK_FALSE(h.pop().has_value());
  CHECK(wl.pushes() == 1);
}

TEST_CASE("single thread pops the earliest bin first") {
  for (std::size_t chunk : {1, 64}) {
    SoftPriorityWorklist wl(chunk, 1);
    auto h = wl.handle(0);
    h.push({0, 5});
    h.push({1, 1});
    h.push({2, 9});
    CHECK(h.pop()->bin == 1);
    CHECK(h.pop()->bin == 5);
    CHECK(h.pop()->bin == 9);
    CHECK_FALSE(h.pop().has_value());
  }
  {
    SoftPriorityWorklist wl(1, 1);
    wl.push({0, 7});
    wl.push({1, 2});
    wl.push({2, 2});
    auto h = wl.handle(0);
    CHECK(h.pop()->bin == 2);
    CHECK(h.pop()->bin == 2);
    CHECK(h.pop()->bin == 7);
  }
}

TEST_CASE("flush publishes partial chunks to other threads") {
  SoftPriorityWorklist wl(64, 2);
  auto a = wl.handle(0);
  auto b = wl.handle(1);
  a.push({1, 4});
  CHECK_FALSE(b.pop().has_value());
  a.flush();
  const auto item = b.pop();
  REQUIRE(item.has_value());
  CHECK(item->node == 1);
}

TEST_CASE("worker that pushes nothing processes each item once") {
  SoftPriorityWorklist wl(8, 4);
  for (std::size_t n = 0; n < 100; ++n) wl.push({n, n % 7});
  std::vector<std::atomic<int>> seen(100);
  wl.run_until_quiescent([&](WorkItem w, SoftPriorityWorklist::Handle&) { seen[w.node].fetch_add(1); }, 4);
  for (auto& s : seen) CHECK(s.load() == 1);
  CHECK(wl.pushes() == 100);
  CHECK(wl.completions() == 100);
}

TEST_CASE("chain of children from one root") {
  for (std::size_t threads : {1, 3}) {
    const std::size_t depth = 500;
    SoftPriorityWorklist wl(16, threads);
    wl.push({0, 0});
    std::atomic<std::size_t> processed{0};
    wl.run_until_quiescent(
        [&](WorkItem w, SoftPriorityWorklist::Handle& h) {
          processed.fetch_add(1);
          if (w.node < depth) h.push({w.node + 1, w.bin + 1});
        },
        threads);
    CHECK(processed.load() == depth + 1);
    CHECK(wl.pushes() == wl.completions());
  }
}

TEST_CASE("conservation across eight threads") {
  SoftPriorityWorklist wl(8, 8);
  for (std::size_t root = 0; root < 8; ++root) wl.push({root, 0});
  std::mutex m;
  std::multiset<std::size_t> pushed;
  std::multiset<std::size_t> popped;
  for (std::size_t root = 0; root < 8; ++root) pushed.insert(root);
  wl.run_until_quiescent(
      [&](WorkItem w, SoftPriorityWorklist::Handle& h) {
        std::vector<WorkItem> children;
        if (w.node < 8) {
          // Each root fans out into 124 distinct children with mixed bins.
          for (std::size_t k = 0; k < 124; ++k) children.push_back({8 + w.node * 124 + k, (k * 37) % 11});
        }
        {
          std::lock_guard lock(m);
          popped.insert(w.node);
          for (const auto& c : children) pushed.insert(c.node);
        }
        for (const auto& c : children) h.push(c);
      },
      8);
  CHECK(pushed.size() == 1000);
  CHECK(pushed == popped);
  CHECK(wl.pushes() == 1000);
  CHECK(wl.completions() == 1000);
  const auto hist = wl.inversion_histogram();
  CHECK(std::accumulate(hist.begin(), hist.end(), std::uint64_t{0}) == wl.inversions());
}

TEST_CASE("single thread with chunk size one is exactly earliest-bin first") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> bin(0, 50);
  SoftPriorityWorklist wl(1, 1);
  std::multiset<std::uint64_t> outstanding;
  for (std::size_t n = 0; n < 20; ++n) {
    const std::uint64_t b = bin(rng);
    wl.push({n, b});
    outstanding.insert(b);
  }
  std::size_t next = 20;
  bool ordered = true;
  wl.run_until_quiescent(
      [&](WorkItem w, SoftPriorityWorklist::Handle& h) {
        ordered = ordered && w.bin == *outstanding.begin();
        outstanding.erase(outstanding.find(w.bin));
        if (next < 3000) {
          for (int k = 0; k < 2; ++k) {
            const std::uint64_t b = w.bin + bin(rng) / 5;
            h.push({next++, b});
            outstanding.insert(b);
          }
        }
      },
      1);
  CHECK(ordered);
  CHECK(outstanding.empty());
  CHECK(wl.inversions() == 0);
}

TEST_CASE("worker exceptions propagate and poison the worklist") {
  SoftPriorityWorklist wl(4, 4);
  for (std::size_t n = 0; n < 50; ++n) wl.push({n, n});
  auto failing = [](WorkItem w, SoftPriorityWorklist::Handle&) {
    if (w.node == 13) throw std::runtime_error("boom");
  };
  CHECK_THROWS_AS(wl.run_until_quiescent(failing, 4), std::runtime_error);
  CHECK_THROWS_AS(wl.run_until_quiescent(failing, 1), std::logic_error);
}
