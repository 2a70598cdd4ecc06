/*******************************************************************************
 * Instrumented allocation counters. Peak auxiliary memory is reported from
 * these counters rather than OS-level sampling so that the numbers are
 * deterministic across runs.
 ******************************************************************************/
#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "leanpart/parallel.hpp"

namespace leanpart::memory {

enum class Phase { kNone = 0, kIo, kCluster, kContract, kInitial, kRefine };
constexpr int kNumPhases = 6;

// What an allocation is for. Only kAux counts against the auxiliary peaks;
// graph storage and partition/clustering state are tracked separately.
enum class Category { kAux = 0, kGraph, kState };

class Tracker {
public:
  static Tracker &instance() {
    static Tracker tracker;
    return tracker;
  }

  void set_phase(const Phase phase) {
    _phase.store(static_cast<int>(phase), std::memory_order_relaxed);
  }

  Phase phase() const {
    return static_cast<Phase>(_phase.load(std::memory_order_relaxed));
  }

  void record_alloc(const Category category, const std::size_t bytes) {
    if (category == Category::kAux) {
      const std::int64_t cur =
          _aux_current.fetch_add(static_cast<std::int64_t>(bytes), std::memory_order_relaxed) +
          static_cast<std::int64_t>(bytes);
      atomic_max(_aux_peak, cur);
      atomic_max(_aux_phase_peak[_phase.load(std::memory_order_relaxed)], cur);
    } else if (category == Category::kGraph) {
      _graph_current.fetch_add(static_cast<std::int64_t>(bytes), std::memory_order_relaxed);
    } else {
      _state_current.fetch_add(static_cast<std::int64_t>(bytes), std::memory_order_relaxed);
    }
  }

  void record_free(const Category category, const std::size_t bytes) {
    if (category == Category::kAux) {
      _aux_current.fetch_sub(static_cast<std::int64_t>(bytes), std::memory_order_relaxed);
    } else if (category == Category::kGraph) {
      _graph_current.fetch_sub(static_cast<std::int64_t>(bytes), std::memory_order_relaxed);
    } else {
      _state_current.fetch_sub(static_cast<std::int64_t>(bytes), std::memory_order_relaxed);
    }
  }

  std::int64_t aux_current() const {
    return _aux_current.load(std::memory_order_relaxed);
  }
  std::int64_t aux_peak() const {
    return _aux_peak.load(std::memory_order_relaxed);
  }
  std::int64_t aux_phase_peak(const Phase phase) const {
    return _aux_phase_peak[static_cast<int>(phase)].load(std::memory_order_relaxed);
  }
  std::int64_t graph_current() const {
    return _graph_current.load(std::memory_order_relaxed);
  }
  std::int64_t state_current() const {
    return _state_current.load(std::memory_order_relaxed);
  }

  // Clears peaks (not currents) at the start of a measured run.
  void reset_peaks() {
    _aux_peak.store(_aux_current.load());
    for (auto &peak : _aux_phase_peak) {
      peak.store(0);
    }
  }

private:
  std::atomic<std::int64_t> _aux_current{0};
  std::atomic<std::int64_t> _aux_peak{0};
  std::array<std::atomic<std::int64_t>, kNumPhases> _aux_phase_peak{};
  std::atomic<std::int64_t> _graph_current{0};
  std::atomic<std::int64_t> _state_current{0};
  std::atomic<int> _phase{0};
};

class PhaseScope {
public:
  explicit PhaseScope(const Phase phase) : _previous(Tracker::instance().phase()) {
    Tracker::instance().set_phase(phase);
  }
  ~PhaseScope() {
    Tracker::instance().set_phase(_previous);
  }
  PhaseScope(const PhaseScope &) = delete;
  PhaseScope &operator=(const PhaseScope &) = delete;

private:
  Phase _previous;
};

template <typename T, Category category = Category::kAux>
class TrackingAllocator {
public:
  using value_type = T;

  // The non-type template parameter defeats the implicit rebind.
  template <typename U>
  struct rebind {
    using other = TrackingAllocator<U, category>;
  };

  TrackingAllocator() = default;
  template <typename U>
  TrackingAllocator(const TrackingAllocator<U, category> &) noexcept {}

  T *allocate(const std::size_t n) {
    Tracker::instance().record_alloc(category, n * sizeof(T));
    return static_cast<T *>(::operator new(n * sizeof(T)));
  }

  void deallocate(T *p, const std::size_t n) noexcept {
    Tracker::instance().record_free(category, n * sizeof(T));
    ::operator delete(p);
  }

  template <typename U>
  bool operator==(const TrackingAllocator<U, category> &) const noexcept {
    return true;
  }
};

template <typename T>
using aux_vector = std::vector<T, TrackingAllocator<T, Category::kAux>>;

template <typename T>
using state_vector = std::vector<T, TrackingAllocator<T, Category::kState>>;

} // namespace leanpart::memory
