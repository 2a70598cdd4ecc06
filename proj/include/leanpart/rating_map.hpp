/*******************************************************************************
 * Rating accumulators for label propagation and contraction: small
 * fixed-capacity hash maps for the parallel first phase and one shared
 * atomic sparse array with per-worker nonzero lists for the second.
 ******************************************************************************/
#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "leanpart/memory.hpp"
#include "leanpart/types.hpp"

namespace leanpart {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Open-addressing map from 32-bit keys to accumulated weights; capacity is
// fixed at construction (no growth). Insertion order is preserved for
// iteration and clear() costs O(occupancy).
class FixedCapacityRatingMap {
public:
  explicit FixedCapacityRatingMap(const std::uint64_t min_capacity) {
    std::uint64_t capacity = 2;
    while (capacity < min_capacity) {
      capacity *= 2;
    }
    _mask = capacity - 1;
    _keys.assign(capacity, kEmptyKey);
    _values.assign(capacity, 0);
    _used.reserve(capacity / 2);
  }

  std::size_t size() const {
    return _used.size();
  }

  std::uint64_t capacity() const {
    return _keys.size();
  }

  // Adds delta to the rating of `key`, inserting it if new.
  void add(const std::uint32_t key, const EdgeWeight delta) {
    std::uint64_t slot = mix64(key) & _mask;
    while (true) {
      if (_keys[slot] == key) {
        _values[slot] += delta;
        return;
      }
      if (_keys[slot] == kEmptyKey) {
        _keys[slot] = key;
        _values[slot] = delta;
        _used.push_back(static_cast<std::uint32_t>(slot));
        return;
      }
      slot = (slot + 1) & _mask;
    }
  }

  EdgeWeight lookup(const std::uint32_t key) const {
    std::uint64_t slot = mix64(key) & _mask;
    while (true) {
      if (_keys[slot] == key) {
        return _values[slot];
      }
      if (_keys[slot] == kEmptyKey) {
        return 0;
      }
      slot = (slot + 1) & _mask;
    }
  }

  // Visits entries in insertion order.
  template <typename F>
  void for_each(F &&fn) const {
    for (const std::uint32_t slot : _used) {
      fn(_keys[slot], _values[slot]);
    }
  }

  void clear() {
    for (const std::uint32_t slot : _used) {
      _keys[slot] = kEmptyKey;
    }
    _used.clear();
  }

private:
  static constexpr std::uint32_t kEmptyKey = 0xFFFFFFFFu;

  std::uint64_t _mask = 0;
  memory::aux_vector<std::uint32_t> _keys;
  memory::aux_vector<EdgeWeight> _values;
  memory::aux_vector<std::uint32_t> _used;
};

// One zero-initialized accumulator per cluster plus per-worker lists of the
// touched indices; O(touched) reset.
class SparseRatingArray {
public:
  SparseRatingArray(const std::size_t size, const int workers)
      : _dense(size),
        _lists(workers) {}

  // Atomically merges a rating map; the worker that raises an entry from
  // zero tracks it in its own list, so the union of lists has no duplicates.
  void flush(FixedCapacityRatingMap &map, const int worker) {
    auto &list = _lists[worker];
    map.for_each([&](const std::uint32_t key, const EdgeWeight value) {
      const EdgeWeight previous = _dense[key].fetch_add(value, std::memory_order_relaxed);
      if (previous == 0) {
        list.push_back(key);
      }
    });
    map.clear();
  }

  EdgeWeight value(const std::uint32_t key) const {
    return _dense[key].load(std::memory_order_relaxed);
  }

  // Visits every touched entry once (across all worker lists).
  template <typename F>
  void for_each_nonzero(F &&fn) const {
    for (const auto &list : _lists) {
      for (const std::uint32_t key : list) {
        fn(key, _dense[key].load(std::memory_order_relaxed));
      }
    }
  }

  // Zeroes touched entries and clears the lists.
  void reset() {
    for (auto &list : _lists) {
      for (const std::uint32_t key : list) {
        _dense[key].store(0, std::memory_order_relaxed);
      }
      list.clear();
    }
  }

  // Test hook for the hygiene invariant.
  bool all_zero() const {
    for (const auto &slot : _dense) {
      if (slot.load(std::memory_order_relaxed) != 0) {
        return false;
      }
    }
    return true;
  }

private:
  memory::aux_vector<std::atomic<EdgeWeight>> _dense;
  std::vector<memory::aux_vector<std::uint32_t>> _lists;
};

// Plain per-worker dense accumulator; this is the O(n p) baseline that the
// two-phase scheme replaces, kept for the memory comparison.
class DenseRatingMap {
public:
  explicit DenseRatingMap(const std::size_t size) : _dense(size, 0) {
    _touched.reserve(64);
  }

  void add(const std::uint32_t key, const EdgeWeight delta) {
    if (_dense[key] == 0) {
      _touched.push_back(key);
    }
    _dense[key] += delta;
  }

  EdgeWeight lookup(const std::uint32_t key) const {
    return _dense[key];
  }

  std::size_t size() const {
    return _touched.size();
  }

  template <typename F>
  void for_each(F &&fn) const {
    for (const std::uint32_t key : _touched) {
      fn(key, _dense[key]);
    }
  }

  void clear() {
    for (const std::uint32_t key : _touched) {
      _dense[key] = 0;
    }
    _touched.clear();
  }

private:
  memory::aux_vector<EdgeWeight> _dense;
  memory::aux_vector<std::uint32_t> _touched;
};

} // namespace leanpart
