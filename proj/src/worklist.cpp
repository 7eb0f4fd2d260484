#include "eikonal/worklist.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace eikonal {

namespace {
constexpr std::uint64_t kNoBin = std::numeric_limits<std::uint64_t>::max();
}  // namespace

std::uint64_t bin_of(double t, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("bin scale must be positive and finite");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("only finite nonnegative times have a bin");
  const double q = std::floor(t / scale);
  if (q >= 18446744073709551616.0) return kNoBin - 1;
  return static_cast<std::uint64_t>(q);
}

struct alignas(64) SoftPriorityWorklist::ThreadState {
  std::map<std::uint64_t, Chunk> pending;
  Chunk current;
  std::uint64_t inversions = 0;
  std::array<std::uint64_t, kHistogramBuckets> histogram{};
};

SoftPriorityWorklist::SoftPriorityWorklist(std::size_t chunk_size, std::size_t max_threads)
    : chunk_size_(chunk_size), threads_(max_threads), min_bin_(kNoBin) {
  if (chunk_size == 0) throw std::invalid_argument("chunk size must be at least 1");
  if (max_threads == 0) throw std::invalid_argument("worklist needs at least one thread");
}

SoftPriorityWorklist::~SoftPriorityWorklist() = default;

SoftPriorityWorklist::Handle SoftPriorityWorklist::handle(std::size_t thread) {
  if (thread >= threads_.size()) throw std::out_of_range("worklist thread index out of range");
  return Handle(*this, thread);
}

void SoftPriorityWorklist::refresh_min_bin_locked() noexcept {
  min_bin_.store(bins_.empty() ? kNoBin : bins_.begin()->first, std::memory_order_release);
}

void SoftPriorityWorklist::publish(std::uint64_t bin, Chunk chunk) {
  std::lock_guard lock(bins_mutex_);
  bins_[bin].push_back(std::move(chunk));
  refresh_min_bin_locked();
}

void SoftPriorityWorklist::push(WorkItem item) {
  pushes_.fetch_add(1);
  publish(item.bin, Chunk{item});
}

void SoftPriorityWorklist::Handle::push(WorkItem item) {
  auto& wl = *owner_;
  auto& st = wl.threads_[index_];
  wl.pushes_.fetch_add(1);
  auto it = st.pending.try_emplace(item.bin).first;
  it->second.push_back(item);
  if (it->second.size() >= wl.chunk_size_) {
    Chunk full = std::move(it->second);
    st.pending.erase(it);
    wl.publish(item.bin, std::move(full));
  }
}

void SoftPriorityWorklist::Handle::flush() {
  auto& wl = *owner_;
  auto& st = wl.threads_[index_];
  for (auto& [bin, chunk] : st.pending) wl.publish(bin, std::move(chunk));
  st.pending.clear();
}

std::optional<WorkItem> SoftPriorityWorklist::Handle::pop() {
  auto& wl = *owner_;
  auto& st = wl.threads_[index_];

  if (st.current.empty()) {
    auto own = st.pending.begin();
    const bool has_own = own != st.pending.end();
    bool take_own = has_own && own->first <= wl.min_bin_.load(std::memory_order_acquire);
    if (!take_own) {
      std::lock_guard lock(wl.bins_mutex_);
      if (!wl.bins_.empty() && (!has_own || wl.bins_.begin()->first < own->first)) {
        auto bin = wl.bins_.begin();
        st.current = std::move(bin->second.back());
        bin->second.pop_back();
        if (bin->second.empty()) wl.bins_.erase(bin);
        wl.refresh_min_bin_locked();
      } else {
        take_own = has_own;
      }
    }
    if (take_own) {
      st.current = std::move(own->second);
      st.pending.erase(own);
    }
    if (st.current.empty()) return std::nullopt;
  }

  const WorkItem item = st.current.back();
  st.current.pop_back();

  std::uint64_t visible_min = wl.min_bin_.load(std::memory_order_relaxed);
  if (!st.pending.empty()) visible_min = std::min(visible_min, st.pending.begin()->first);
  if (item.bin > visible_min) {
    ++st.inversions;
    const auto width = static_cast<std::size_t>(std::bit_width(item.bin - visible_min));
    ++st.histogram[std::min(width, kHistogramBuckets - 1)];
  }
  return item;
}

void SoftPriorityWorklist::run_until_quiescent(const Worker& worker, std::size_t threads) {
  if (poisoned_) throw std::logic_error("worklist is unusable after a failed run");
  if (threads == 0 || threads > threads_.size()) throw std::invalid_argument("thread count out of range");

  aborted_.store(false);
  std::exception_ptr error;
  std::mutex error_mutex;

  auto body = [&](std::size_t index) {
    Handle h(*this, index);
    try {
      while (!aborted_.load(std::memory_order_relaxed)) {
        if (auto item = h.pop()) {
          worker(*item, h);
          completions_.fetch_add(1);
          continue;
        }
        // Completions are read before pushes: equality then proves that at
        // the moment of the first read nothing was outstanding.
        const std::uint64_t done = completions_.load();
        if (done == pushes_.load()) break;
        std::this_thread::yield();
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      aborted_.store(true);
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(body, t);
    body(0);
  }

  if (error) {
    poisoned_ = true;
    std::rethrow_exception(error);
  }
}

std::uint64_t SoftPriorityWorklist::inversions() const noexcept {
  std::uint64_t total = 0;
  for (const auto& st : threads_) total += st.inversions;
  return total;
}

std::array<std::uint64_t, SoftPriorityWorklist::kHistogramBuckets>
SoftPriorityWorklist::inversion_histogram() const noexcept {
  std::array<std::uint64_t, kHistogramBuckets> out{};
  for (const auto& st : threads_) {
    for (std::size_t k = 0; k < kHistogramBuckets; ++k) out[k] += st.histogram[k];
  }
  return out;
}

}  // namespace eikonal
