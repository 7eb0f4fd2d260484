#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "eikonal/grid.hpp"
#include "eikonal/metrics.hpp"
#include "eikonal/update.hpp"

namespace eikonal {

enum class Method { FMM, Topological, FSM, FIM, AMM };

/// When a node counts as changed for re-activation. Stored values only ever
/// decrease in both modes; AnyChange additionally re-activates a node whose
/// proposal differed from its stored value without being smaller.
enum class Tracking { DecreaseOnly, AnyChange };

std::string_view to_string(Method method) noexcept;
std::string_view to_string(Tracking tracking) noexcept;
/// Accepts fmm, topological, fsm, fim, amm.
Method parse_method(std::string_view name);
/// Accepts decrease, any.
Tracking parse_tracking(std::string_view name);

inline constexpr std::size_t kDefaultChunkSize = 64;

struct SolveConfig {
  Method method = Method::FMM;
  UpdateVariant variant = UpdateVariant::MonotoneRoot;
  double epsilon = 0.0;          // FIM convergence threshold
  std::optional<double> scale;   // AMM bin width; defaults to h / (4 max v)
  std::size_t threads = 1;
  Tracking tracking = Tracking::DecreaseOnly;
  std::size_t chunk_size = kDefaultChunkSize;
  /// Record every operator application into SolveResult::trace.
  bool trace = false;
  /// Final values used to classify updates on the fly; must outlive the solve.
  const ArrivalGrid* reference = nullptr;

  /// Throws std::invalid_argument for inconsistent settings, e.g. threads > 1
  /// with a single-threaded method.
  void validate() const;
};

struct SolveResult {
  explicit SolveResult(ArrivalGrid final_arrivals) : arrivals(std::move(final_arrivals)) {}

  ArrivalGrid arrivals;
  /// Operator applications, seeds excluded.
  std::uint64_t updates = 0;
  /// Present when SolveConfig::reference was given.
  std::optional<UpdateCounters> stats;
  std::vector<TraceEntry> trace;
  double wall_time = 0.0;
  /// Out-of-order pops observed by the AMM worklist.
  std::uint64_t inversions = 0;
  /// Rounds for topological and FIM, sweep cycles for FSM, 0 otherwise.
  std::size_t rounds = 0;
};

/// Raised when a runtime check finds a broken solver invariant.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// h / (4 max v): a quarter of the fastest single-cell traversal time.
double default_scale(const VelocityGrid& velocity);

/// Dispatches on config.method.
SolveResult solve(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config);

/// Best-first marching with an exact priority queue keyed by (arrival time,
/// node index).
SolveResult solve_fmm(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config);

/// Rounds over all non-seed nodes in linear-index order until a round leaves
/// every stored value unchanged.
SolveResult solve_topological(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config);

/// Cycles of four alternating-direction sweeps until a cycle changes nothing.
SolveResult solve_fsm(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config);

/// Two-list rounds: a node whose own update decreased it by at most epsilon
/// relaxes its neighbors that are not waiting in the current list, otherwise
/// it stays active for the next round. Rounds may run on several threads.
SolveResult solve_fim(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config);

/// Asynchronous marching over a soft-priority worklist binned by
/// floor(t / scale).
SolveResult solve_amm(const VelocityGrid& velocity, const SeedSet& seeds, const SolveConfig& config);

}  // namespace eikonal
