/*******************************************************************************
 * k-way partition state: block assignment, block weights and the balance
 * budget.
 ******************************************************************************/
#pragma once

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "leanpart/graph.hpp"
#include "leanpart/memory.hpp"
#include "leanpart/types.hpp"

namespace leanpart {

// Balance budget ceil((1 + epsilon) * total / k), computed in exact integer
// arithmetic with epsilon quantized to parts per billion.
inline VertexWeight max_block_weight(const VertexWeight total, const BlockId k, const double epsilon) {
  if (k == 0) {
    throw std::invalid_argument("k must be at least 1");
  }
  if (epsilon < 0) {
    throw std::invalid_argument("epsilon must be nonnegative");
  }
  const auto eps_ppb = static_cast<std::int64_t>(std::llround(epsilon * 1e9));
  const auto numer = static_cast<__int128>(total) * (1000000000LL + eps_ppb);
  const auto denom = static_cast<__int128>(k) * 1000000000LL;
  return static_cast<VertexWeight>((numer + denom - 1) / denom);
}

class Partition {
public:
  Partition(const VertexId n, const BlockId k, const double epsilon, const VertexWeight total_weight,
            const VertexWeight heaviest_vertex)
      : _k(k),
        _epsilon(epsilon),
        _total_weight(total_weight),
        _assignment(n),
        _block_weights(k),
        // A block must at least be able to hold the heaviest (possibly
        // contracted) vertex, otherwise no feasible partition exists.
        _max_block_weight(
            std::max(leanpart::max_block_weight(total_weight, k, epsilon), heaviest_vertex)
        ) {}

  // Keeps an existing balance budget when a partition is carried across
  // hierarchy levels.
  void override_budget(const VertexWeight budget) {
    _max_block_weight = budget;
  }

  BlockId k() const {
    return _k;
  }
  double epsilon() const {
    return _epsilon;
  }
  VertexId n() const {
    return static_cast<VertexId>(_assignment.size());
  }
  VertexWeight max_block_weight() const {
    return _max_block_weight;
  }
  VertexWeight total_weight() const {
    return _total_weight;
  }

  BlockId block_of(const VertexId u) const {
    return _assignment[u].load(std::memory_order_relaxed);
  }

  void set_block(const VertexId u, const BlockId b) {
    _assignment[u].store(b, std::memory_order_relaxed);
  }

  VertexWeight block_weight(const BlockId b) const {
    return _block_weights[b].load(std::memory_order_relaxed);
  }

  void add_block_weight(const BlockId b, const VertexWeight delta) {
    _block_weights[b].fetch_add(delta, std::memory_order_relaxed);
  }

  // Atomically reserves room in block b; fails if the budget would be
  // exceeded. The caller moves the vertex only after a successful reserve.
  bool try_reserve(const BlockId b, const VertexWeight w) {
    VertexWeight cur = _block_weights[b].load(std::memory_order_relaxed);
    while (cur + w <= _max_block_weight) {
      if (_block_weights[b].compare_exchange_weak(cur, cur + w, std::memory_order_relaxed)) {
        return true;
      }
    }
    return false;
  }

  bool is_balanced() const {
    for (BlockId b = 0; b < _k; ++b) {
      if (block_weight(b) > _max_block_weight) {
        return false;
      }
    }
    return true;
  }

  // max_i blockWeight_i * k / W - 1: the fractional headroom used against
  // epsilon.
  double imbalance() const {
    VertexWeight heaviest = 0;
    for (BlockId b = 0; b < _k; ++b) {
      heaviest = std::max(heaviest, block_weight(b));
    }
    if (_total_weight == 0) {
      return 0.0;
    }
    return static_cast<double>(heaviest) * _k / static_cast<double>(_total_weight) - 1.0;
  }

  std::vector<BlockId> assignment_snapshot() const {
    std::vector<BlockId> out(n());
    for (VertexId u = 0; u < n(); ++u) {
      out[u] = block_of(u);
    }
    return out;
  }

  Partition clone() const {
    Partition copy(n(), _k, _epsilon, _total_weight, 0);
    copy._max_block_weight = _max_block_weight;
    for (VertexId u = 0; u < n(); ++u) {
      copy._assignment[u].store(block_of(u));
    }
    for (BlockId b = 0; b < _k; ++b) {
      copy._block_weights[b].store(block_weight(b));
    }
    return copy;
  }

  // Recomputes block weights from scratch; used after bulk assignment.
  template <GraphLike G>
  void rebuild_block_weights(const G &g) {
    for (BlockId b = 0; b < _k; ++b) {
      _block_weights[b].store(0);
    }
    for (VertexId u = 0; u < g.n(); ++u) {
      _block_weights[block_of(u)].fetch_add(g.vertex_weight(u), std::memory_order_relaxed);
    }
  }

private:
  BlockId _k;
  double _epsilon;
  VertexWeight _total_weight;
  memory::state_vector<std::atomic<BlockId>> _assignment;
  memory::state_vector<std::atomic<VertexWeight>> _block_weights;
  VertexWeight _max_block_weight;
};

// Total weight of edges crossing between blocks, each undirected edge
// counted once.
template <GraphLike G>
EdgeWeight edge_cut(const G &g, const Partition &p, WorkerPool *pool = nullptr) {
  if (p.n() != g.n()) {
    throw std::invalid_argument("partition length does not match vertex count");
  }
  return detail::edge_cut_impl(g, [&](const VertexId u) { return p.block_of(u); }, pool);
}

} // namespace leanpart
