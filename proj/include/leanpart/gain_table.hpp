/*******************************************************************************
 * Gain tables for FM refinement. The sparse variant caches vertex-to-block
 * affinities in O(sum min(deg, k)) space: dense k-slot rows only for
 * vertices with deg > k, tiny fixed-capacity linear-probing tables with
 * backshift deletion for everyone else, and per-vertex entry widths sized
 * to the incident edge weight.
 ******************************************************************************/
#pragma once

#include <atomic>
#include <cstring>
#include <vector>

#include "leanpart/graph.hpp"
#include "leanpart/memory.hpp"
#include "leanpart/parallel.hpp"
#include "leanpart/partition.hpp"
#include "leanpart/rating_map.hpp"
#include "leanpart/types.hpp"

namespace leanpart {

enum class GainTableMode { kSparse, kDense, kNone };

struct GainTableFootprint {
  std::uint64_t entries = 0; // (block, affinity) pairs the table can hold
  std::uint64_t bytes = 0;   // arenas plus descriptors
};

namespace gain_detail {

// Smallest w in {8,16,32,64} with value < 2^w.
inline int width_log2(const EdgeWeight max_value) {
  const auto v = static_cast<std::uint64_t>(max_value);
  if ((v >> 8) == 0) {
    return 0;
  }
  if ((v >> 16) == 0) {
    return 1;
  }
  if ((v >> 32) == 0) {
    return 2;
  }
  return 3;
}

template <typename T>
EdgeWeight atomic_load_as(const std::uint8_t *slot) {
  // atomic_ref does not accept const objects; the underlying slots are
  // always writable arena bytes.
  auto *mutable_slot = const_cast<T *>(reinterpret_cast<const T *>(slot));
  return static_cast<EdgeWeight>(std::atomic_ref<T>(*mutable_slot).load(std::memory_order_relaxed));
}

template <typename T>
void atomic_add_as(std::uint8_t *slot, const EdgeWeight delta) {
  std::atomic_ref<T>(*reinterpret_cast<T *>(slot))
      .fetch_add(static_cast<T>(delta), std::memory_order_relaxed);
}

template <typename T>
void atomic_store_as(std::uint8_t *slot, const EdgeWeight value) {
  std::atomic_ref<T>(*reinterpret_cast<T *>(slot)).store(static_cast<T>(value), std::memory_order_relaxed);
}

inline EdgeWeight slot_load(const std::uint8_t *slot, const int width_log) {
  switch (width_log) {
  case 0:
    return atomic_load_as<std::uint8_t>(slot);
  case 1:
    return atomic_load_as<std::uint16_t>(slot);
  case 2:
    return atomic_load_as<std::uint32_t>(slot);
  default:
    return atomic_load_as<std::uint64_t>(slot);
  }
}

inline void slot_add(std::uint8_t *slot, const int width_log, const EdgeWeight delta) {
  switch (width_log) {
  case 0:
    atomic_add_as<std::uint8_t>(slot, delta);
    break;
  case 1:
    atomic_add_as<std::uint16_t>(slot, delta);
    break;
  case 2:
    atomic_add_as<std::uint32_t>(slot, delta);
    break;
  default:
    atomic_add_as<std::uint64_t>(slot, delta);
    break;
  }
}

inline void slot_store(std::uint8_t *slot, const int width_log, const EdgeWeight value) {
  switch (width_log) {
  case 0:
    atomic_store_as<std::uint8_t>(slot, value);
    break;
  case 1:
    atomic_store_as<std::uint16_t>(slot, value);
    break;
  case 2:
    atomic_store_as<std::uint32_t>(slot, value);
    break;
  default:
    atomic_store_as<std::uint64_t>(slot, value);
    break;
  }
}

} // namespace gain_detail

class SparseGainTable {
  static constexpr std::uint32_t kEmptyKey = 0xFFFFFFFFu;

  struct Descriptor {
    std::uint64_t value_offset; // bytes into the value arena
    std::uint64_t key_offset;   // slots into the key arena (tiny mode only)
    std::uint32_t capacity;     // slots
    std::uint8_t width_log;     // value width: 1 << width_log bytes
    std::uint8_t dense;         // 1: k-slot row indexed by block
  };

public:
  template <GraphLike G>
  static SparseGainTable build(const G &g, const Partition &p, WorkerPool &pool) {
    SparseGainTable table;
    const VertexId n = g.n();
    const BlockId k = p.k();
    table._k = k;
    table._descriptors.resize(n);
    table._latches = memory::aux_vector<std::atomic<std::uint8_t>>(n);

    // Lay out the arenas: offsets are alignment-safe because each vertex's
    // slice is aligned to its own entry width.
    std::uint64_t value_bytes = 0;
    std::uint64_t key_slots = 0;
    for (VertexId v = 0; v < n; ++v) {
      EdgeWeight incident = 0;
      g.neighbors(v, [&](EdgeId, VertexId, const EdgeWeight w) { incident += w; });
      const int width_log = gain_detail::width_log2(incident);
      const auto deg = static_cast<std::uint64_t>(g.degree(v));
      Descriptor &d = table._descriptors[v];
      d.width_log = static_cast<std::uint8_t>(width_log);
      d.dense = deg > k ? 1 : 0;
      d.capacity = d.dense != 0 ? k : 2 * static_cast<std::uint32_t>(std::min<std::uint64_t>(deg, k));
      const std::uint64_t width = std::uint64_t{1} << width_log;
      value_bytes = (value_bytes + width - 1) & ~(width - 1);
      d.value_offset = value_bytes;
      value_bytes += static_cast<std::uint64_t>(d.capacity) << width_log;
      d.key_offset = key_slots;
      if (d.dense == 0) {
        key_slots += d.capacity;
      }
    }
    table._values.assign(value_bytes, 0);
    table._keys.assign(key_slots, kEmptyKey);

    parallel_for(pool, 0, n, [&](int, const std::uint64_t i) {
      const auto v = static_cast<VertexId>(i);
      g.neighbors(v, [&](EdgeId, const VertexId t, const EdgeWeight w) {
        table.add_affinity(v, p.block_of(t), w);
      });
    });
    return table;
  }

  BlockId k() const {
    return _k;
  }

  // omega(v, V_block): zero when not stored.
  EdgeWeight affinity(const VertexId v, const BlockId block) const {
    const Descriptor &d = _descriptors[v];
    if (d.dense != 0) {
      return gain_detail::slot_load(value_slot(d, block), d.width_log);
    }
    if (d.capacity == 0) {
      return 0;
    }
    std::uint32_t slot = home_slot(d, block);
    for (std::uint32_t probes = 0; probes < d.capacity; ++probes) {
      const std::uint32_t key = key_at(d, slot);
      if (key == block) {
        return gain_detail::slot_load(value_slot(d, slot), d.width_log);
      }
      if (key == kEmptyKey) {
        return 0;
      }
      slot = next_slot(d, slot);
    }
    return 0;
  }

  // gain of moving v to `target`: omega(v, target) - omega(v, current).
  EdgeWeight gain(const VertexId v, const BlockId target, const Partition &p) const {
    return affinity(v, target) - affinity(v, p.block_of(v));
  }

  // Affinity updates for all neighbors of a vertex that moved from -> to.
  template <GraphLike G>
  void apply_move(const G &g, const VertexId moved, const BlockId from, const BlockId to) {
    if (from == to) {
      throw std::invalid_argument("degenerate move");
    }
    g.neighbors(moved, [&](EdgeId, const VertexId v, const EdgeWeight w) {
      const Descriptor &d = _descriptors[v];
      if (d.dense != 0) {
        gain_detail::slot_add(value_slot(d, from), d.width_log, -w);
        gain_detail::slot_add(value_slot(d, to), d.width_log, w);
        return;
      }
      lock(v);
      tiny_add(d, to, w);
      tiny_add(d, from, -w);
      unlock(v);
    });
  }

  // Visits the stored positive affinities of v.
  template <typename F>
  void for_each_affinity(const VertexId v, F &&fn) const {
    const Descriptor &d = _descriptors[v];
    if (d.dense != 0) {
      for (BlockId b = 0; b < _k; ++b) {
        const EdgeWeight value = gain_detail::slot_load(value_slot(d, b), d.width_log);
        if (value > 0) {
          fn(b, value);
        }
      }
      return;
    }
    for (std::uint32_t slot = 0; slot < d.capacity; ++slot) {
      const std::uint32_t key = key_at(d, slot);
      if (key != kEmptyKey) {
        fn(static_cast<BlockId>(key), gain_detail::slot_load(value_slot(d, slot), d.width_log));
      }
    }
  }

  GainTableFootprint footprint() const {
    GainTableFootprint out;
    for (const Descriptor &d : _descriptors) {
      // Tiny tables hold at most capacity/2 = min(deg, k) pairs; dense rows
      // hold k.
      out.entries += d.dense != 0 ? d.capacity : d.capacity / 2;
    }
    out.bytes = _values.size() + _keys.size() * sizeof(std::uint32_t) +
                _descriptors.size() * sizeof(Descriptor) +
                _latches.size() * sizeof(std::atomic<std::uint8_t>);
    return out;
  }

  int entry_width_bits(const VertexId v) const {
    return 8 << _descriptors[v].width_log;
  }

  bool is_dense_row(const VertexId v) const {
    return _descriptors[v].dense != 0;
  }

  // Test hook: no stored zeros, and every probe chain is gap-free (each key
  // is reachable from its home slot without crossing an empty slot).
  bool debug_validate() const {
    for (VertexId v = 0; v < static_cast<VertexId>(_descriptors.size()); ++v) {
      const Descriptor &d = _descriptors[v];
      if (d.dense != 0) {
        continue;
      }
      for (std::uint32_t slot = 0; slot < d.capacity; ++slot) {
        const std::uint32_t key = key_at(d, slot);
        if (key == kEmptyKey) {
          continue;
        }
        if (gain_detail::slot_load(value_slot(d, slot), d.width_log) <= 0) {
          return false;
        }
        std::uint32_t probe = home_slot(d, key);
        bool reachable = false;
        for (std::uint32_t steps = 0; steps < d.capacity; ++steps) {
          if (probe == slot) {
            reachable = true;
            break;
          }
          if (key_at(d, probe) == kEmptyKey) {
            break;
          }
          probe = next_slot(d, probe);
        }
        if (!reachable) {
          return false;
        }
      }
    }
    return true;
  }

private:
  std::uint8_t *value_slot(const Descriptor &d, const std::uint32_t slot) {
    return _values.data() + d.value_offset + (static_cast<std::uint64_t>(slot) << d.width_log);
  }
  const std::uint8_t *value_slot(const Descriptor &d, const std::uint32_t slot) const {
    return _values.data() + d.value_offset + (static_cast<std::uint64_t>(slot) << d.width_log);
  }

  std::uint32_t key_at(const Descriptor &d, const std::uint32_t slot) const {
    auto &key = const_cast<std::uint32_t &>(_keys[d.key_offset + slot]);
    return std::atomic_ref<std::uint32_t>(key).load(std::memory_order_relaxed);
  }

  void set_key(const Descriptor &d, const std::uint32_t slot, const std::uint32_t key) {
    std::atomic_ref<std::uint32_t>(_keys[d.key_offset + slot]).store(key, std::memory_order_relaxed);
  }

  std::uint32_t home_slot(const Descriptor &d, const BlockId block) const {
    return static_cast<std::uint32_t>(mix64(block) % d.capacity);
  }

  std::uint32_t next_slot(const Descriptor &d, const std::uint32_t slot) const {
    return slot + 1 == d.capacity ? 0 : slot + 1;
  }

  void lock(const VertexId v) {
    auto &latch = _latches[v];
    std::uint8_t expected = 0;
    while (!latch.compare_exchange_weak(expected, 1, std::memory_order_acquire)) {
      expected = 0;
    }
  }

  void unlock(const VertexId v) {
    _latches[v].store(0, std::memory_order_release);
  }

  // Insert/update/delete under the per-table latch. Deleting closes probe
  // chain gaps by shifting later entries up.
  void tiny_add(const Descriptor &d, const BlockId block, const EdgeWeight delta) {
    std::uint32_t slot = home_slot(d, block);
    for (std::uint32_t probes = 0; probes <= d.capacity; ++probes) {
      const std::uint32_t key = key_at(d, slot);
      if (key == block) {
        const EdgeWeight now =
            gain_detail::slot_load(value_slot(d, slot), d.width_log) + delta;
        if (now == 0) {
          tiny_erase(d, slot);
        } else {
          gain_detail::slot_store(value_slot(d, slot), d.width_log, now);
        }
        return;
      }
      if (key == kEmptyKey) {
        if (delta == 0) {
          return;
        }
        if (delta < 0) {
          throw std::logic_error("gain table decrement for an absent affinity");
        }
        set_key(d, slot, block);
        gain_detail::slot_store(value_slot(d, slot), d.width_log, delta);
        return;
      }
      slot = next_slot(d, slot);
    }
    // Distinct adjacent blocks never exceed min(deg, k) = capacity / 2.
    throw std::logic_error("tiny gain table overflow");
  }

  void tiny_erase(const Descriptor &d, std::uint32_t hole) {
    set_key(d, hole, kEmptyKey);
    gain_detail::slot_store(value_slot(d, hole), d.width_log, 0);
    std::uint32_t slot = next_slot(d, hole);
    while (true) {
      const std::uint32_t key = key_at(d, slot);
      if (key == kEmptyKey) {
        return;
      }
      const std::uint32_t home = home_slot(d, key);
      // Move the entry into the hole unless its home lies strictly between
      // the hole and its current slot (cyclically).
      const std::uint32_t cap = d.capacity;
      const std::uint32_t dist_home = (slot + cap - home) % cap;
      const std::uint32_t dist_hole = (slot + cap - hole) % cap;
      if (dist_home >= dist_hole) {
        set_key(d, hole, key);
        gain_detail::slot_store(
            value_slot(d, hole), d.width_log,
            gain_detail::slot_load(value_slot(d, slot), d.width_log)
        );
        set_key(d, slot, kEmptyKey);
        gain_detail::slot_store(value_slot(d, slot), d.width_log, 0);
        hole = slot;
      }
      slot = next_slot(d, slot);
    }
  }

  // Build-time accumulation; rows are owned by one worker, no latch needed.
  void add_affinity(const VertexId v, const BlockId block, const EdgeWeight w) {
    const Descriptor &d = _descriptors[v];
    if (d.dense != 0) {
      gain_detail::slot_add(value_slot(d, block), d.width_log, w);
    } else {
      tiny_add(d, block, w);
    }
  }

  BlockId _k = 0;
  memory::aux_vector<Descriptor> _descriptors;
  memory::aux_vector<std::uint8_t> _values;
  memory::aux_vector<std::uint32_t> _keys;
  memory::aux_vector<std::atomic<std::uint8_t>> _latches;
};

// Standard O(nk) gain table, kept for the footprint and speed comparison.
class DenseGainTable {
public:
  template <GraphLike G>
  static DenseGainTable build(const G &g, const Partition &p, WorkerPool &pool) {
    DenseGainTable table;
    table._k = p.k();
    table._table = memory::aux_vector<std::atomic<EdgeWeight>>(
        static_cast<std::size_t>(g.n()) * p.k()
    );
    parallel_for(pool, 0, g.n(), [&](int, const std::uint64_t i) {
      const auto v = static_cast<VertexId>(i);
      g.neighbors(v, [&](EdgeId, const VertexId t, const EdgeWeight w) {
        table._table[static_cast<std::size_t>(v) * table._k + p.block_of(t)].fetch_add(
            w, std::memory_order_relaxed
        );
      });
    });
    return table;
  }

  EdgeWeight affinity(const VertexId v, const BlockId block) const {
    return _table[static_cast<std::size_t>(v) * _k + block].load(std::memory_order_relaxed);
  }

  EdgeWeight gain(const VertexId v, const BlockId target, const Partition &p) const {
    return affinity(v, target) - affinity(v, p.block_of(v));
  }

  template <GraphLike G>
  void apply_move(const G &g, const VertexId moved, const BlockId from, const BlockId to) {
    g.neighbors(moved, [&](EdgeId, const VertexId v, const EdgeWeight w) {
      _table[static_cast<std::size_t>(v) * _k + from].fetch_sub(w, std::memory_order_relaxed);
      _table[static_cast<std::size_t>(v) * _k + to].fetch_add(w, std::memory_order_relaxed);
    });
  }

  template <typename F>
  void for_each_affinity(const VertexId v, F &&fn) const {
    for (BlockId b = 0; b < _k; ++b) {
      const EdgeWeight value = affinity(v, b);
      if (value > 0) {
        fn(b, value);
      }
    }
  }

  GainTableFootprint footprint() const {
    return {_table.size(), _table.size() * sizeof(std::atomic<EdgeWeight>)};
  }

private:
  BlockId _k = 0;
  memory::aux_vector<std::atomic<EdgeWeight>> _table;
};

// No cache at all: affinities are recomputed from the neighborhood on every
// query. Slow but memoryless; the third point of the comparison.
template <GraphLike G>
class NoGainTable {
public:
  NoGainTable(const G &g, const Partition &p) : _g(&g), _p(&p) {}

  EdgeWeight affinity(const VertexId v, const BlockId block) const {
    EdgeWeight sum = 0;
    _g->neighbors(v, [&](EdgeId, const VertexId t, const EdgeWeight w) {
      if (_p->block_of(t) == block) {
        sum += w;
      }
    });
    return sum;
  }

  EdgeWeight gain(const VertexId v, const BlockId target, const Partition &p) const {
    return affinity(v, target) - affinity(v, p.block_of(v));
  }

  template <typename GG>
  void apply_move(const GG &, VertexId, BlockId, BlockId) {}

  template <typename F>
  void for_each_affinity(const VertexId v, F &&fn) const {
    FixedCapacityRatingMap map(2 * (static_cast<std::uint64_t>(_p->k()) + 1));
    _g->neighbors(v, [&](EdgeId, const VertexId t, const EdgeWeight w) {
      map.add(_p->block_of(t), w);
    });
    map.for_each([&](const std::uint32_t block, const EdgeWeight value) {
      if (value > 0) {
        fn(static_cast<BlockId>(block), value);
      }
    });
  }

  GainTableFootprint footprint() const {
    return {0, 0};
  }

private:
  const G *_g;
  const Partition *_p;
};

} // namespace leanpart
