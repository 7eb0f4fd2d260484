#include "eikonal/solvers.hpp"

#include <atomic>
#include <barrier>
#include <bit>
#include <cassert>
#include <chrono>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <thread>

#include "eikonal/worklist.hpp"

namespace eikonal {

namespace {

using Clock = std::chrono::steady_clock;

/// Per-thread bookkeeping of operator applications.
class Recorder {
 public:
  explicit Recorder(const SolveConfig& config)
      : reference_(config.reference), exact_(is_exact(config.variant)), trace_(config.trace) {}

  void record(std::size_t node, double old_value, double new_value) {
    ++updates_;
    if (reference_ != nullptr) {
      switch (classify_update(old_value, new_value, (*reference_)[node], exact_)) {
        case UpdateKind::Good: ++counters_.good; break;
        case UpdateKind::Empty: ++counters_.empty; break;
        case UpdateKind::Bad: ++counters_.bad; break;
      }
      ++counters_.total;
    }
    if (trace_) entries_.push_back({node, old_value, new_value});
  }

  void merge_into(SolveResult& result) {
    result.updates += updates_;
    if (reference_ != nullptr) {
      if (!result.stats) result.stats.emplace();
      *result.stats += counters_;
    }
    result.trace.insert(result.trace.end(), entries_.begin(), entries_.end());
  }

 private:
  const ArrivalGrid* reference_;
  bool exact_;
  bool trace_;
  std::uint64_t updates_ = 0;
  UpdateCounters counters_;
  std::vector<TraceEntry> entries_;
};

struct Relaxation {
  double old_value;   // stored value the update was compared against
  double stored;      // stored value afterwards
  bool committed;     // stored value decreased
  bool activate;      // node should be re-activated
};

/// Shared state of one solve.
class Problem {
 public:
  Problem(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config)
      : velocity_(velocity),
        shape_(velocity.shape()),
        config_(config),
        arrivals_(init_arrivals(velocity.shape(), seeds)),
        is_seed_(seed_mask(velocity.shape(), seeds)) {
    config.validate();
    if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
    if (config.reference != nullptr && !(config.reference->shape() == shape_)) {
      throw std::invalid_argument("reference grid shape does not match velocity grid");
    }
    for (const Seed& s : seeds) seed_nodes_.push_back(shape_.index(s.i, s.j));
  }

  const GridShape& shape() const noexcept { return shape_; }
  const SolveConfig& config() const noexcept { return config_; }
  bool is_seed(std::size_t node) const noexcept { return is_seed_[node] != 0; }
  const std::vector<std::size_t>& seed_nodes() const noexcept { return seed_nodes_; }
  ArrivalGrid& arrivals() noexcept { return arrivals_; }

  /// Single-threaded update of one node with a plain decrease-only write.
  Relaxation relax(std::size_t node) {
    double* t = arrivals_.values().data();
    const StencilInputs s = gather_stencil_with(
        shape_, [t](std::size_t m) { return t[m]; }, velocity_[node], shape_.i_of(node), shape_.j_of(node));
    const double proposal = propose(s, config_.variant);
    const double current = t[node];
    const bool committed = proposal < current;
    if (committed) t[node] = proposal;
    return finish(current, proposal, committed);
  }

  /// Thread-safe update: neighbor reads are atomic and the write is a
  /// conditional replace that only ever lowers the stored value.
  Relaxation relax_concurrent(std::size_t node) {
    double* t = arrivals_.values().data();
    const StencilInputs s = gather_stencil_with(
        shape_, [t](std::size_t m) { return std::atomic_ref<double>(t[m]).load(std::memory_order_relaxed); },
        velocity_[node], shape_.i_of(node), shape_.j_of(node));
    const double proposal = propose(s, config_.variant);
    std::atomic_ref<double> slot(t[node]);
    double current = slot.load(std::memory_order_relaxed);
    bool committed = false;
    while (proposal < current) {
      if (slot.compare_exchange_weak(current, proposal, std::memory_order_relaxed)) {
        committed = true;
        break;
      }
    }
    return finish(current, proposal, committed);
  }

  /// Runtime checks of the arrival-grid invariants after a solve.
  void check_result() const {
    for (std::size_t n = 0; n < shape_.size(); ++n) {
      const double t = arrivals_[n];
      if (std::isnan(t) || t < 0.0) {
        throw InvariantViolation("arrival time at node " + std::to_string(n) + " is negative or NaN");
      }
    }
  }

  SolveResult finish_result(std::vector<Recorder>& recorders, Clock::time_point start) {
    check_result();
    SolveResult result(std::move(arrivals_));
    for (auto& r : recorders) r.merge_into(result);
    if (config_.reference != nullptr && !result.stats) result.stats.emplace();
    result.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
  }

 private:
  Relaxation finish(double current, double proposal, bool committed) const noexcept {
    assert(!committed || proposal < current);
    const bool differs = std::bit_cast<std::uint64_t>(proposal) != std::bit_cast<std::uint64_t>(current);
    const bool activate = committed || (config_.tracking == Tracking::AnyChange && differs);
    return {current, committed ? proposal : current, committed, activate};
  }

  const VelocityGrid& velocity_;
  GridShape shape_;
  const SolveConfig& config_;
  ArrivalGrid arrivals_;
  std::vector<std::uint8_t> is_seed_;
  std::vector<std::size_t> seed_nodes_;
};

SolveConfig with_method(const SolveConfig& config, Method method) {
  SolveConfig c = config;
  c.method = method;
  return c;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::FMM: return "fmm";
    case Method::Topological: return "topological";
    case Method::FSM: return "fsm";
    case Method::FIM: return "fim";
    case Method::AMM: return "amm";
  }
  return "unknown";
}

std::string_view to_string(Tracking tracking) noexcept {
  return tracking == Tracking::DecreaseOnly ? "decrease" : "any";
}

Method parse_method(std::string_view name) {
  if (name == "fmm") return Method::FMM;
  if (name == "topological") return Method::Topological;
  if (name == "fsm") return Method::FSM;
  if (name == "fim") return Method::FIM;
  if (name == "amm") return Method::AMM;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

Tracking parse_tracking(std::string_view name) {
  if (name == "decrease") return Tracking::DecreaseOnly;
  if (name == "any") return Tracking::AnyChange;
  throw std::invalid_argument("unknown tracking mode '" + std::string(name) + "'");
}

void SolveConfig::validate() const {
  if (threads == 0) throw std::invalid_argument("thread count must be at least 1");
  if (threads > 1 && method != Method::AMM && method != Method::FIM) {
    throw std::invalid_argument(std::string(to_string(method)) + " is single-threaded; use --threads 1");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be finite and >= 0");
  if (scale && (!(*scale > 0.0) || !std::isfinite(*scale))) {
    throw std::invalid_argument("scale must be positive and finite");
  }
  if (chunk_size == 0) throw std::invalid_argument("chunk size must be at least 1");
}

double default_scale(const VelocityGrid& velocity) {
  return velocity.shape().h() / (4.0 * velocity.max_speed());
}

SolveResult solve(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config) {
  switch (config.method) {
    case Method::FMM: return solve_fmm(velocity, seeds, config);
    case Method::Topological: return solve_topological(velocity, seeds, config);
    case Method::FSM: return solve_fsm(velocity, seeds, config);
    case Method::FIM: return solve_fim(velocity, seeds, config);
    case Method::AMM: return solve_amm(velocity, seeds, config);
  }
  throw std::invalid_argument("unknown method");
}

SolveResult solve_fmm(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config) {
  const auto start = Clock::now();
  const SolveConfig cfg = with_method(config, Method::FMM);
  Problem problem(velocity, seeds, cfg);
  std::vector<Recorder> recorders(1, Recorder(cfg));
  Recorder& rec = recorders.front();

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (std::size_t n : problem.seed_nodes()) queue.emplace(problem.arrivals()[n], n);

  while (!queue.empty()) {
    const std::size_t n = queue.top().second;
    queue.pop();
    for (std::size_t m : neighbors_of(problem.shape(), n)) {
      if (problem.is_seed(m)) continue;
      const Relaxation r = problem.relax(m);
      rec.record(m, r.old_value, r.stored);
      if (r.activate) queue.emplace(r.stored, m);
    }
  }
  return problem.finish_result(recorders, start);
}

SolveResult solve_topological(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config) {
  const auto start = Clock::now();
  const SolveConfig cfg = with_method(config, Method::Topological);
  Problem problem(velocity, seeds, cfg);
  std::vector<Recorder> recorders(1, Recorder(cfg));
  Recorder& rec = recorders.front();

  std::size_t rounds = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    ++rounds;
    for (std::size_t n = 0; n < problem.shape().size(); ++n) {
      if (problem.is_seed(n)) continue;
      const Relaxation r = problem.relax(n);
      rec.record(n, r.old_value, r.stored);
      changed = changed || r.committed;
    }
  }
  SolveResult result = problem.finish_result(recorders, start);
  result.rounds = rounds;
  return result;
}

SolveResult solve_fsm(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config) {
  const auto start = Clock::now();
  const SolveConfig cfg = with_method(config, Method::FSM);
  Problem problem(velocity, seeds, cfg);
  std::vector<Recorder> recorders(1, Recorder(cfg));
  Recorder& rec = recorders.front();

  const auto nx = static_cast<std::ptrdiff_t>(problem.shape().nx());
  const auto ny = static_cast<std::ptrdiff_t>(problem.shape().ny());
  bool changed = false;
  auto sweep = [&](bool i_forward, bool j_forward) {
    for (std::ptrdiff_t jj = 0; jj < ny; ++jj) {
      const std::ptrdiff_t j = j_forward ? jj : ny - 1 - jj;
      for (std::ptrdiff_t ii = 0; ii < nx; ++ii) {
        const std::ptrdiff_t i = i_forward ? ii : nx - 1 - ii;
        const auto n = static_cast<std::size_t>(j * nx + i);
        if (problem.is_seed(n)) continue;
        const Relaxation r = problem.relax(n);
        rec.record(n, r.old_value, r.stored);
        changed = changed || r.committed;
      }
    }
  };

  std::size_t cycles = 0;
  do {
    changed = false;
    ++cycles;
    sweep(true, true);
    sweep(false, true);
    sweep(false, false);
    sweep(true, false);
  } while (changed);

  SolveResult result = problem.finish_result(recorders, start);
  result.rounds = cycles;
  return result;
}

SolveResult solve_fim(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config) {
  const auto start = Clock::now();
  const SolveConfig cfg = with_method(config, Method::FIM);
  Problem problem(velocity, seeds, cfg);
  const std::size_t threads = cfg.threads;
  const bool concurrent = threads > 1;
  std::vector<Recorder> recorders(threads, Recorder(cfg));

  const std::size_t size = problem.shape().size();
  // Presence flags: in_current marks nodes still waiting in this round's list,
  // in_next deduplicates pushes onto the next round's list.
  std::vector<std::uint8_t> in_current(size, 0);
  std::vector<std::uint8_t> in_next(size, 0);
  std::vector<std::size_t> current = problem.seed_nodes();
  std::vector<std::vector<std::size_t>> next(threads);
  std::atomic<std::size_t> cursor{0};
  std::size_t rounds = 0;

  auto load_flag = [&](std::vector<std::uint8_t>& flags, std::size_t n) {
    return concurrent ? std::atomic_ref<std::uint8_t>(flags[n]).load(std::memory_order_relaxed) : flags[n];
  };
  auto clear_flag = [&](std::vector<std::uint8_t>& flags, std::size_t n) {
    if (concurrent) {
      std::atomic_ref<std::uint8_t>(flags[n]).store(0, std::memory_order_relaxed);
    } else {
      flags[n] = 0;
    }
  };
  // True when this call set the flag.
  auto claim_flag = [&](std::vector<std::uint8_t>& flags, std::size_t n) {
    if (concurrent) return std::atomic_ref<std::uint8_t>(flags[n]).exchange(1, std::memory_order_relaxed) == 0;
    const bool was_clear = flags[n] == 0;
    flags[n] = 1;
    return was_clear;
  };
  auto relax = [&](std::size_t n) { return concurrent ? problem.relax_concurrent(n) : problem.relax(n); };

  auto process = [&](std::size_t thread, std::size_t n) {
    Recorder& rec = recorders[thread];
    auto& out = next[thread];
    clear_flag(in_current, n);
    bool converged = true;
    if (!problem.is_seed(n)) {
      const Relaxation self = relax(n);
      rec.record(n, self.old_value, self.stored);
      // A first finite value is an infinite decrease and keeps the node active.
      converged = self.old_value == self.stored || self.old_value - self.stored <= cfg.epsilon;
    }
    if (!converged) {
      if (claim_flag(in_next, n)) out.push_back(n);
      return;
    }
    for (std::size_t m : neighbors_of(problem.shape(), n)) {
      if (problem.is_seed(m) || load_flag(in_current, m) != 0) continue;
      const Relaxation r = relax(m);
      rec.record(m, r.old_value, r.stored);
      if (r.activate && claim_flag(in_next, m)) out.push_back(m);
    }
  };

  // Runs between rounds on exactly one thread.
  auto advance = [&]() noexcept {
    current.clear();
    for (auto& list : next) {
      current.insert(current.end(), list.begin(), list.end());
      list.clear();
    }
    for (std::size_t n : current) {
      in_next[n] = 0;
      in_current[n] = 1;
    }
    cursor.store(0);
    ++rounds;
  };

  for (std::size_t n : current) in_current[n] = 1;
  ++rounds;
  if (!concurrent) {
    while (!current.empty()) {
      for (std::size_t n : current) process(0, n);
      advance();
    }
  } else {
    std::barrier sync(static_cast<std::ptrdiff_t>(threads), advance);
    auto body = [&](std::size_t thread) {
      while (!current.empty()) {
        for (std::size_t k = cursor.fetch_add(1); k < current.size(); k = cursor.fetch_add(1)) {
          process(thread, current[k]);
        }
        sync.arrive_and_wait();
      }
    };
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(body, t);
    body(0);
  }

  SolveResult result = problem.finish_result(recorders, start);
  // The final advance produced an empty list, which is not a round.
  result.rounds = rounds - 1;
  return result;
}

SolveResult solve_amm(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config) {
  const auto start = Clock::now();
  const SolveConfig cfg = with_method(config, Method::AMM);
  Problem problem(velocity, seeds, cfg);
  const double scale = cfg.scale.value_or(default_scale(velocity));
  const std::size_t threads = cfg.threads;
  std::vector<Recorder> recorders(threads, Recorder(cfg));

  SoftPriorityWorklist worklist(cfg.chunk_size, threads);
  for (std::size_t n : problem.seed_nodes()) worklist.push({n, bin_of(problem.arrivals()[n], scale)});

  const bool concurrent = threads > 1;
  worklist.run_until_quiescent(
      [&](WorkItem item, SoftPriorityWorklist::Handle& handle) {
        Recorder& rec = recorders[handle.thread_index()];
        for (std::size_t m : neighbors_of(problem.shape(), item.node)) {
          if (problem.is_seed(m)) continue;
          const Relaxation r = concurrent ? problem.relax_concurrent(m) : problem.relax(m);
          rec.record(m, r.old_value, r.stored);
          if (r.activate && std::isfinite(r.stored)) handle.push({m, bin_of(r.stored, scale)});
        }
      },
      threads);

  if (worklist.pushes() != worklist.completions()) {
    throw InvariantViolation("worklist finished with unbalanced push/completion counters");
  }
  SolveResult result = problem.finish_result(recorders, start);
  result.inversions = worklist.inversions();
  return result;
}

}  // namespace eikonal
