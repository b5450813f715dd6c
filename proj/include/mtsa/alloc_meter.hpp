#pragma once

#include <atomic>
#include <cstddef>

namespace mtsa {

/// Counts float elements allocated through the matrix layer. This tracks
/// algorithmic working-set size, not process heap bytes: every Matrix
/// constructed while a meter is active adds its element count, and releases
/// it on destruction.
class AllocMeter {
 public:
  void on_alloc(std::size_t n) noexcept {
    const std::size_t cur = current_.fetch_add(n, std::memory_order_relaxed) + n;
    std::size_t peak = peak_.load(std::memory_order_relaxed);
    while (cur > peak &&
           !peak_.compare_exchange_weak(peak, cur, std::memory_order_relaxed)) {
    }
  }

  void on_free(std::size_t n) noexcept {
    current_.fetch_sub(n, std::memory_order_relaxed);
  }

  void reset() noexcept {
    current_.store(0, std::memory_order_relaxed);
    peak_.store(0, std::memory_order_relaxed);
  }

  std::size_t current_floats() const noexcept {
    return current_.load(std::memory_order_relaxed);
  }
  std::size_t peak_floats() const noexcept {
    return peak_.load(std::memory_order_relaxed);
  }

 private:
  std::atomic<std::size_t> current_{0};
  std::atomic<std::size_t> peak_{0};
};

/// Routes matrix allocations made on this thread to `meter` for the scope's
/// lifetime. Pass nullptr to suspend metering (e.g. while building parameters
/// that should not count as temporaries).
class MeterScope {
 public:
  explicit MeterScope(AllocMeter* meter) noexcept;
  explicit MeterScope(AllocMeter& meter) noexcept : MeterScope(&meter) {}
  ~MeterScope();

  MeterScope(const MeterScope&) = delete;
  MeterScope& operator=(const MeterScope&) = delete;

 private:
  AllocMeter* prev_;
};

/// Meter receiving this thread's matrix allocations, or nullptr.
AllocMeter* active_alloc_meter() noexcept;

}  // namespace mtsa
