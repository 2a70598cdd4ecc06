/*******************************************************************************
 * Uncompressed weighted graph in CSR form plus the cut/validation arithmetic
 * shared by all other modules.
 ******************************************************************************/
#pragma once

#include <concepts>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "leanpart/owned_array.hpp"
#include "leanpart/parallel.hpp"
#include "leanpart/types.hpp"

namespace leanpart {

// Interface shared by Graph and CompressedGraph: everything downstream of
// the input representation is written against this.
template <typename G>
concept GraphLike = requires(const G &g, VertexId u) {
  { g.n() } -> std::convertible_to<VertexId>;
  { g.m() } -> std::convertible_to<EdgeId>;
  { g.degree(u) } -> std::convertible_to<EdgeId>;
  { g.vertex_weight(u) } -> std::convertible_to<VertexWeight>;
  { g.total_vertex_weight() } -> std::convertible_to<VertexWeight>;
  g.neighbors(u, [](EdgeId, VertexId, EdgeWeight) {});
};

class Graph {
public:
  Graph() = default;

  Graph(
      OwnedArray<EdgeId> offsets,
      OwnedArray<VertexId> targets,
      OwnedArray<EdgeWeight> edge_weights,
      OwnedArray<VertexWeight> vertex_weights
  )
      : _offsets(std::move(offsets)),
        _targets(std::move(targets)),
        _edge_weights(std::move(edge_weights)),
        _vertex_weights(std::move(vertex_weights)) {
    _total_vertex_weight = 0;
    for (const VertexWeight w : _vertex_weights) {
      _total_vertex_weight = checked_add(_total_vertex_weight, w);
    }
  }

  VertexId n() const {
    return _offsets.empty() ? 0 : static_cast<VertexId>(_offsets.size() - 1);
  }

  // Number of undirected edges; arcs() == 2 * m().
  EdgeId m() const {
    return arcs() / 2;
  }

  EdgeId arcs() const {
    return _offsets.empty() ? 0 : _offsets.back();
  }

  EdgeId degree(const VertexId u) const {
    return _offsets[u + 1] - _offsets[u];
  }

  EdgeId first_arc(const VertexId u) const {
    return _offsets[u];
  }

  VertexWeight vertex_weight(const VertexId u) const {
    return _vertex_weights[u];
  }

  VertexWeight total_vertex_weight() const {
    return _total_vertex_weight;
  }

  template <typename F>
  void neighbors(const VertexId u, F &&fn) const {
    for (EdgeId e = _offsets[u]; e < _offsets[u + 1]; ++e) {
      fn(e, _targets[e], _edge_weights[e]);
    }
  }

  // Edge-parallel visitor: fn(worker, edge, target, weight), workers split
  // the arc range of u.
  template <typename F>
  void neighbors_parallel(const VertexId u, WorkerPool &pool, F &&fn) const {
    const EdgeId begin = _offsets[u];
    const EdgeId end = _offsets[u + 1];
    parallel_chunks(
        pool, begin, end, std::max<EdgeId>(256, (end - begin) / (4 * pool.workers())),
        [&](const int worker, const std::uint64_t lo, const std::uint64_t hi) {
          for (EdgeId e = lo; e < hi; ++e) {
            fn(worker, e, _targets[e], _edge_weights[e]);
          }
        }
    );
  }

  std::span<const EdgeId> offsets() const {
    return _offsets.span();
  }
  std::span<const VertexId> targets() const {
    return _targets.span();
  }
  std::span<const EdgeWeight> edge_weights() const {
    return _edge_weights.span();
  }
  std::span<const VertexWeight> vertex_weights() const {
    return _vertex_weights.span();
  }

  VertexWeight max_vertex_weight() const {
    VertexWeight max = 0;
    for (const VertexWeight w : _vertex_weights) {
      max = std::max(max, w);
    }
    return max;
  }

  EdgeId max_degree() const {
    EdgeId max = 0;
    for (VertexId u = 0; u < n(); ++u) {
      max = std::max(max, degree(u));
    }
    return max;
  }

  std::size_t byte_size() const {
    return _offsets.size() * sizeof(EdgeId) + _targets.size() * sizeof(VertexId) +
           _edge_weights.size() * sizeof(EdgeWeight) + _vertex_weights.size() * sizeof(VertexWeight);
  }

private:
  OwnedArray<EdgeId> _offsets;
  OwnedArray<VertexId> _targets;
  OwnedArray<EdgeWeight> _edge_weights;
  OwnedArray<VertexWeight> _vertex_weights;
  VertexWeight _total_vertex_weight = 0;
};

static_assert(GraphLike<Graph>);

// Diagnostic CSR check: returns one message per violation, empty if the
// graph is well-formed (monotone offsets, no self-loops, positive weights,
// symmetric arcs with equal weights).
std::vector<std::string> validate_graph(const Graph &g);

namespace detail {

template <GraphLike G, typename Assignment>
EdgeWeight edge_cut_impl(const G &g, const Assignment &block_of, WorkerPool *pool) {
  const VertexId n = g.n();
  std::int64_t total = 0;
  if (pool != nullptr && pool->workers() > 1) {
    std::vector<std::int64_t> partial(pool->workers(), 0);
    parallel_chunks(
        *pool, 0, n, std::max<std::uint64_t>(64, n / (8 * pool->workers())),
        [&](const int worker, const std::uint64_t lo, const std::uint64_t hi) {
          std::int64_t sum = 0;
          for (VertexId u = static_cast<VertexId>(lo); u < hi; ++u) {
            g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
              if (block_of(u) != block_of(v)) {
                sum += w;
              }
            });
          }
          partial[worker] += sum;
        }
    );
    total = std::accumulate(partial.begin(), partial.end(), std::int64_t{0});
  } else {
    for (VertexId u = 0; u < n; ++u) {
      g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
        if (block_of(u) != block_of(v)) {
          total = checked_add(total, w);
        }
      });
    }
  }
  // Each undirected edge was counted once per direction.
  return total / 2;
}

} // namespace detail

} // namespace leanpart
