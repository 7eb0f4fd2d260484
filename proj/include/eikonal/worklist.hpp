#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

namespace eikonal {

struct WorkItem {
  std::size_t node;
  std::uint64_t bin;

  friend bool operator==(const WorkItem&, const WorkItem&) = default;
};

struct WorklistConfig {
  double scale = 1.0;          // bin width in arrival-time units
  std::size_t chunk_size = 64; // items per chunk moved between threads and the shared bins
};

/// floor(t / scale). Throws std::invalid_argument for t outside [0, +inf)
/// or a non-positive scale.
std::uint64_t bin_of(double t, double scale);

/// Concurrent worklist ordered by integer bins, treating the bin as a soft
/// priority.
///
/// Shared state is an ordered map from bin to a bag of chunks. Each thread
/// fills a private chunk per bin and publishes it once it holds chunk_size
/// items, and pops from a private chunk taken from the earliest bin it can
/// see (its own unpublished chunks included). With one thread the pop order
/// is therefore exactly earliest-bin first; with several threads items may
/// be processed out of bin order, which is counted as priority inversion.
class SoftPriorityWorklist {
  struct ThreadState;

 public:
  /// Number of histogram buckets; bucket k counts inversions whose distance
  /// to the minimum visible bin has bit width k (clamped to the last bucket).
  static constexpr std::size_t kHistogramBuckets = 16;

  /// Per-thread access point. Only the owning thread may use a handle.
  class Handle {
   public:
    void push(WorkItem item);
    /// Earliest item visible to this thread, or nothing when neither the
    /// thread's own chunks nor the shared bins hold work. An empty result
    /// does not mean the worklist is globally empty.
    std::optional<WorkItem> pop();
    /// Publishes all of this thread's partially filled chunks.
    void flush();
    std::size_t thread_index() const noexcept { return index_; }

   private:
    friend class SoftPriorityWorklist;
    Handle(SoftPriorityWorklist& owner, std::size_t index) : owner_(&owner), index_(index) {}
    SoftPriorityWorklist* owner_;
    std::size_t index_;
  };

  using Worker = std::function<void(WorkItem, Handle&)>;

  SoftPriorityWorklist(std::size_t chunk_size, std::size_t max_threads);
  ~SoftPriorityWorklist();
  SoftPriorityWorklist(const SoftPriorityWorklist&) = delete;
  SoftPriorityWorklist& operator=(const SoftPriorityWorklist&) = delete;

  Handle handle(std::size_t thread);

  /// Pushes straight into the shared bins; usable from any thread, typically
  /// to seed the initial work before run_until_quiescent.
  void push(WorkItem item);

  /// Runs `worker` on `threads` threads until every pushed item has been
  /// popped and completed. A worker exception stops all threads, is
  /// rethrown here and leaves the worklist unusable.
  void run_until_quiescent(const Worker& worker, std::size_t threads);

  std::uint64_t pushes() const noexcept { return pushes_.load(); }
  std::uint64_t completions() const noexcept { return completions_.load(); }
  std::uint64_t inversions() const noexcept;
  std::array<std::uint64_t, kHistogramBuckets> inversion_histogram() const noexcept;

 private:
  using Chunk = std::vector<WorkItem>;

  void publish(std::uint64_t bin, Chunk chunk);
  void refresh_min_bin_locked() noexcept;

  std::size_t chunk_size_;
  std::vector<ThreadState> threads_;

  std::mutex bins_mutex_;
  std::map<std::uint64_t, std::vector<Chunk>> bins_;
  std::atomic<std::uint64_t> min_bin_;

  std::atomic<std::uint64_t> pushes_{0};
  std::atomic<std::uint64_t> completions_{0};
  std::atomic<bool> aborted_{false};
  bool poisoned_ = false;
};

}  // namespace eikonal
