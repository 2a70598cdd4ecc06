/*******************************************************************************
 * Clustering state for coarsening: vertex -> cluster assignment plus
 * size-constrained cluster weights.
 ******************************************************************************/
#pragma once

#include <atomic>
#include <vector>

#include "leanpart/graph.hpp"
#include "leanpart/memory.hpp"
#include "leanpart/types.hpp"

namespace leanpart {

class Clustering {
public:
  template <GraphLike G>
  static Clustering singletons(const G &g, const VertexWeight max_cluster_weight) {
    Clustering c(g.n(), max_cluster_weight);
    for (VertexId u = 0; u < g.n(); ++u) {
      c._assignment[u].store(u, std::memory_order_relaxed);
      c._weights[u].store(g.vertex_weight(u), std::memory_order_relaxed);
    }
    return c;
  }

  VertexId n() const {
    return static_cast<VertexId>(_assignment.size());
  }

  ClusterId cluster_of(const VertexId u) const {
    return _assignment[u].load(std::memory_order_relaxed);
  }

  void set_cluster(const VertexId u, const ClusterId c) {
    _assignment[u].store(c, std::memory_order_relaxed);
  }

  VertexWeight cluster_weight(const ClusterId c) const {
    return _weights[c].load(std::memory_order_relaxed);
  }

  VertexWeight max_cluster_weight() const {
    return _max_cluster_weight;
  }

  // Compare-and-reserve: admits the vertex only while the committed weight
  // stays within the budget.
  bool try_reserve(const ClusterId c, const VertexWeight w) {
    VertexWeight cur = _weights[c].load(std::memory_order_relaxed);
    while (cur + w <= _max_cluster_weight) {
      if (_weights[c].compare_exchange_weak(cur, cur + w, std::memory_order_relaxed)) {
        return true;
      }
    }
    return false;
  }

  void release(const ClusterId c, const VertexWeight w) {
    _weights[c].fetch_sub(w, std::memory_order_relaxed);
  }

  std::vector<ClusterId> snapshot() const {
    std::vector<ClusterId> out(n());
    for (VertexId u = 0; u < n(); ++u) {
      out[u] = cluster_of(u);
    }
    return out;
  }

  std::vector<VertexWeight> weight_snapshot() const {
    std::vector<VertexWeight> out(n());
    for (ClusterId c = 0; c < n(); ++c) {
      out[c] = cluster_weight(c);
    }
    return out;
  }

private:
  Clustering(const VertexId n, const VertexWeight max_cluster_weight)
      : _assignment(n),
        _weights(n),
        _max_cluster_weight(max_cluster_weight) {}

  memory::state_vector<std::atomic<ClusterId>> _assignment;
  memory::state_vector<std::atomic<VertexWeight>> _weights;
  VertexWeight _max_cluster_weight;
};

} // namespace leanpart
