/*******************************************************************************
 * One-pass parallel contraction. Coarse neighborhoods are aggregated into
 * per-worker rating maps, buffered, and written straight into the final CSR
 * arrays at positions handed out by one dual counter transaction per buffer
 * flush; cluster IDs in the arc array are remapped to coarse vertex IDs at
 * the end, so the coarse graph is stored exactly once.
 ******************************************************************************/
#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "leanpart/clustering.hpp"
#include "leanpart/graph.hpp"
#include "leanpart/memory.hpp"
#include "leanpart/parallel.hpp"
#include "leanpart/rating_map.hpp"
#include "leanpart/reserved_buffer.hpp"
#include "leanpart/types.hpp"

namespace leanpart {

// (arcs written, coarse vertices finalized), advanced atomically as one
// 128-bit transaction; every advance returns the exact prior pair.
class DualCounter {
public:
  struct Pair {
    std::uint64_t arcs;
    std::uint64_t vertices;
  };

  Pair advance(const std::uint64_t arc_delta, const std::uint64_t vertex_delta) {
#ifdef LEANPART_CX16
    // Every access goes through the 16-byte compare-and-swap, including the
    // optimistic read (a CAS with identical values), so reads never tear.
    unsigned __int128 expected = __sync_val_compare_and_swap(&_packed, 0, 0);
    while (true) {
      const auto arcs = static_cast<std::uint64_t>(expected);
      const auto vertices = static_cast<std::uint64_t>(expected >> 64);
      const unsigned __int128 desired =
          (static_cast<unsigned __int128>(vertices + vertex_delta) << 64) |
          static_cast<unsigned __int128>(arcs + arc_delta);
      const unsigned __int128 seen = __sync_val_compare_and_swap(&_packed, expected, desired);
      if (seen == expected) {
        return {arcs, vertices};
      }
      expected = seen;
    }
#else
    std::unique_lock lock(_mutex);
    const Pair previous{_arcs, _vertices};
    _arcs += arc_delta;
    _vertices += vertex_delta;
    return previous;
#endif
  }

  // Single-threaded advance for the sequential second phase.
  Pair advance_sequential(const std::uint64_t arc_delta, const std::uint64_t vertex_delta) {
    return advance(arc_delta, vertex_delta);
  }

  Pair load() const {
#ifdef LEANPART_CX16
    const unsigned __int128 packed =
        __sync_val_compare_and_swap(const_cast<unsigned __int128 *>(&_packed), 0, 0);
    return {static_cast<std::uint64_t>(packed), static_cast<std::uint64_t>(packed >> 64)};
#else
    std::unique_lock lock(_mutex);
    return {_arcs, _vertices};
#endif
  }

private:
#ifdef LEANPART_CX16
  alignas(16) unsigned __int128 _packed = 0;
#else
  mutable std::mutex _mutex;
  std::uint64_t _arcs = 0;
  std::uint64_t _vertices = 0;
#endif
};

struct CoarseMapping {
  // Original cluster ID -> coarse vertex ID (finalization order).
  memory::state_vector<VertexId> cluster_to_coarse;
  // Fine vertex -> coarse vertex, the composition with the clustering.
  memory::state_vector<VertexId> fine_to_coarse;

  VertexId coarse_of(const VertexId fine) const {
    return fine_to_coarse[fine];
  }
};

struct ContractionStats {
  EdgeId reserved_arcs = 0;
  EdgeId committed_arcs = 0;
  VertexId coarse_vertices = 0;
  VertexId bumped_clusters = 0;
  // One entry per dual-counter transaction when collection is enabled.
  struct Range {
    std::uint64_t arc_begin;
    std::uint64_t arc_count;
    std::uint64_t vertex_begin;
    std::uint64_t vertex_count;
  };
  std::vector<Range> transactions;
};

struct ContractionConfig {
  std::uint64_t t_bump = 10000;
  std::size_t buffer_capacity = 32768; // arcs per worker buffer
  bool collect_transactions = false;
};

struct ContractionResult {
  Graph coarse;
  CoarseMapping mapping;
  ContractionStats stats;
};

namespace detail {

// Fixed-capacity staging area holding the coarse arcs of several finalized
// neighborhoods; flushed with a single dual-counter transaction.
class NeighborhoodBuffer {
public:
  explicit NeighborhoodBuffer(const std::size_t arc_capacity) : _capacity(arc_capacity) {
    _targets.reserve(arc_capacity);
    _weights.reserve(arc_capacity);
  }

  bool fits(const std::size_t arc_count) const {
    return _targets.size() + arc_count <= _capacity;
  }
  bool empty() const {
    return _clusters.empty();
  }
  std::size_t arcs() const {
    return _targets.size();
  }
  std::size_t neighborhoods() const {
    return _clusters.size();
  }

  void begin_neighborhood(const ClusterId cluster, const VertexWeight weight) {
    _clusters.push_back(cluster);
    _cluster_weights.push_back(weight);
    _starts.push_back(_targets.size());
  }

  void push_arc(const ClusterId target, const EdgeWeight weight) {
    _targets.push_back(target);
    _weights.push_back(weight);
  }

  // One transaction covering everything in the buffer; copies arcs into the
  // reserved output arrays and finalizes offsets, weights and the mapping.
  void flush(
      DualCounter &counter,
      VertexId *target_out,
      EdgeWeight *weight_out,
      EdgeId *offset_out,
      VertexWeight *coarse_weight_out,
      VertexId *cluster_to_coarse,
      ContractionStats *stats,
      std::mutex *stats_mutex
  ) {
    if (empty()) {
      return;
    }
    const auto [arc_begin, vertex_begin] = counter.advance(_targets.size(), _clusters.size());
    scatter(arc_begin, vertex_begin, target_out, weight_out, offset_out, coarse_weight_out,
            cluster_to_coarse);
    if (stats != nullptr) {
      std::unique_lock lock(*stats_mutex);
      stats->transactions.push_back({arc_begin, _targets.size(), vertex_begin, _clusters.size()});
    }
    clear();
  }

  void flush_sequential(
      DualCounter &counter,
      VertexId *target_out,
      EdgeWeight *weight_out,
      EdgeId *offset_out,
      VertexWeight *coarse_weight_out,
      VertexId *cluster_to_coarse,
      ContractionStats *stats
  ) {
    if (empty()) {
      return;
    }
    const auto [arc_begin, vertex_begin] =
        counter.advance_sequential(_targets.size(), _clusters.size());
    scatter(arc_begin, vertex_begin, target_out, weight_out, offset_out, coarse_weight_out,
            cluster_to_coarse);
    if (stats != nullptr) {
      stats->transactions.push_back({arc_begin, _targets.size(), vertex_begin, _clusters.size()});
    }
    clear();
  }

private:
  void scatter(
      const std::uint64_t arc_begin,
      const std::uint64_t vertex_begin,
      VertexId *target_out,
      EdgeWeight *weight_out,
      EdgeId *offset_out,
      VertexWeight *coarse_weight_out,
      VertexId *cluster_to_coarse
  ) const {
    std::copy(_targets.begin(), _targets.end(), target_out + arc_begin);
    std::copy(_weights.begin(), _weights.end(), weight_out + arc_begin);
    for (std::size_t j = 0; j < _clusters.size(); ++j) {
      const auto coarse = static_cast<VertexId>(vertex_begin + j);
      offset_out[coarse] = arc_begin + _starts[j];
      coarse_weight_out[coarse] = _cluster_weights[j];
      cluster_to_coarse[_clusters[j]] = coarse;
    }
  }

  void clear() {
    _targets.clear();
    _weights.clear();
    _clusters.clear();
    _cluster_weights.clear();
    _starts.clear();
  }

  std::size_t _capacity;
  memory::aux_vector<VertexId> _targets;
  memory::aux_vector<EdgeWeight> _weights;
  memory::aux_vector<ClusterId> _clusters;
  memory::aux_vector<VertexWeight> _cluster_weights;
  memory::aux_vector<std::size_t> _starts;
};

} // namespace detail

// Replaces every stored target (an original cluster ID) with its coarse
// vertex ID; parallel over arcs.
void remap_targets(std::span<VertexId> targets, std::span<const VertexId> cluster_to_coarse, WorkerPool &pool);

// Cross-cluster adjacency of cluster `a`, keyed by neighbor cluster;
// brute-force oracle-style helper (scans the whole graph for members).
template <GraphLike G>
std::map<ClusterId, EdgeWeight>
aggregate_coarse_neighborhood(const G &g, const Clustering &c, const ClusterId a) {
  std::map<ClusterId, EdgeWeight> out;
  for (VertexId u = 0; u < g.n(); ++u) {
    if (c.cluster_of(u) != a) {
      continue;
    }
    g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
      const ClusterId d = c.cluster_of(v);
      if (d != a) {
        out[d] += w;
      }
    });
  }
  return out;
}

// Contracts the clustering into the coarse graph in one pass.
template <GraphLike G>
ContractionResult contract(
    const G &g, const Clustering &c, WorkerPool &pool, const ContractionConfig &config = {}
) {
  const VertexId n = g.n();
  const EdgeId fine_arcs = 2 * g.m();

  // Bucket the vertices by cluster so members can be scanned per cluster.
  memory::aux_vector<std::atomic<VertexId>> bucket_index(n + 1);
  for (VertexId u = 0; u < n; ++u) {
    bucket_index[c.cluster_of(u)].fetch_add(1, std::memory_order_relaxed);
  }
  memory::aux_vector<ClusterId> nonempty;
  VertexId coarse_n = 0;
  {
    VertexId running = 0;
    for (ClusterId id = 0; id < n; ++id) {
      const VertexId count = bucket_index[id].load(std::memory_order_relaxed);
      if (count > 0) {
        nonempty.push_back(id);
        ++coarse_n;
      }
      bucket_index[id].store(running, std::memory_order_relaxed);
      running += count;
    }
    bucket_index[n].store(running, std::memory_order_relaxed);
  }
  memory::aux_vector<VertexId> buckets(n);
  memory::aux_vector<std::atomic<VertexId>> fill(n);
  parallel_for(pool, 0, n, [&](int, const std::uint64_t i) {
    const auto u = static_cast<VertexId>(i);
    const ClusterId cluster = c.cluster_of(u);
    const VertexId pos = bucket_index[cluster].load(std::memory_order_relaxed) +
                         fill[cluster].fetch_add(1, std::memory_order_relaxed);
    buckets[pos] = u;
  });

  ContractionResult result;
  result.stats.reserved_arcs = fine_arcs;
  result.stats.coarse_vertices = coarse_n;
  ContractionStats *stats_ptr = config.collect_transactions ? &result.stats : nullptr;
  std::mutex stats_mutex;

  // Final CSR storage, reserved once at the fine arc count.
  ReservedBuffer<VertexId> target_out(fine_arcs, memory::Category::kGraph);
  ReservedBuffer<EdgeWeight> weight_out(fine_arcs, memory::Category::kGraph);
  std::vector<EdgeId> offset_out(static_cast<std::size_t>(coarse_n) + 1, 0);
  std::vector<VertexWeight> coarse_weights(coarse_n, 0);
  result.mapping.cluster_to_coarse.assign(n, kInvalidVertex);
  result.mapping.fine_to_coarse.assign(n, kInvalidVertex);

  DualCounter counter;
  std::vector<memory::aux_vector<ClusterId>> bump_lists(pool.workers());

  // Phase one: cluster-parallel aggregation with bounded maps and buffers.
  {
    std::atomic<std::size_t> cursor{0};
    pool.run([&](const int worker) {
      FixedCapacityRatingMap map(2 * std::max<std::uint64_t>(2, config.t_bump));
      detail::NeighborhoodBuffer buffer(config.buffer_capacity);
      for (;;) {
        const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
        if (i >= nonempty.size()) {
          break;
        }
        const ClusterId a = nonempty[i];
        VertexWeight cluster_weight = 0;
        bool bumped = false;
        const VertexId members_begin = bucket_index[a].load(std::memory_order_relaxed);
        const VertexId members_end = bucket_index[a + 1].load(std::memory_order_relaxed);
        for (VertexId s = members_begin; s < members_end && !bumped; ++s) {
          const VertexId u = buckets[s];
          cluster_weight = checked_add(cluster_weight, g.vertex_weight(u));
          g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
            if (bumped) {
              return;
            }
            const ClusterId d = c.cluster_of(v);
            if (d == a) {
              return;
            }
            map.add(d, w);
            if (map.size() >= config.t_bump) {
              bumped = true;
            }
          });
        }
        if (bumped) {
          map.clear();
          bump_lists[worker].push_back(a);
          continue;
        }
        const std::size_t degree = map.size();
        if (degree > config.buffer_capacity) {
          // Oversized neighborhood: its own transaction, bypassing the buffer.
          const auto [arc_begin, vertex_begin] = counter.advance(degree, 1);
          const auto coarse = static_cast<VertexId>(vertex_begin);
          offset_out[coarse] = arc_begin;
          coarse_weights[coarse] = cluster_weight;
          result.mapping.cluster_to_coarse[a] = coarse;
          EdgeId e = arc_begin;
          map.for_each([&](const std::uint32_t d, const EdgeWeight w) {
            target_out.data()[e] = d;
            weight_out.data()[e] = w;
            ++e;
          });
          if (stats_ptr != nullptr) {
            std::unique_lock lock(stats_mutex);
            stats_ptr->transactions.push_back({arc_begin, degree, vertex_begin, 1});
          }
          map.clear();
          continue;
        }
        if (!buffer.fits(degree)) {
          buffer.flush(counter, target_out.data(), weight_out.data(), offset_out.data(),
                       coarse_weights.data(), result.mapping.cluster_to_coarse.data(), stats_ptr,
                       &stats_mutex);
        }
        buffer.begin_neighborhood(a, cluster_weight);
        map.for_each([&](const std::uint32_t d, const EdgeWeight w) { buffer.push_arc(d, w); });
        map.clear();
      }
      buffer.flush(counter, target_out.data(), weight_out.data(), offset_out.data(),
                   coarse_weights.data(), result.mapping.cluster_to_coarse.data(), stats_ptr,
                   &stats_mutex);
    });
  }

  // Phase two: bumped clusters, one at a time, member-parallel aggregation
  // into the shared sparse array; counter updates need no atomics here.
  {
    VertexId total_bumped = 0;
    for (const auto &list : bump_lists) {
      total_bumped += list.size();
    }
    result.stats.bumped_clusters = total_bumped;
    if (total_bumped > 0) {
      SparseRatingArray array(n, pool.workers());
      std::vector<std::unique_ptr<FixedCapacityRatingMap>> maps;
      for (int w = 0; w < pool.workers(); ++w) {
        maps.push_back(
            std::make_unique<FixedCapacityRatingMap>(2 * std::max<std::uint64_t>(2, config.t_bump))
        );
      }
      detail::NeighborhoodBuffer buffer(config.buffer_capacity);
      for (const auto &list : bump_lists) {
        for (const ClusterId a : list) {
          const VertexId members_begin = bucket_index[a].load(std::memory_order_relaxed);
          const VertexId members_end = bucket_index[a + 1].load(std::memory_order_relaxed);
          std::atomic<VertexWeight> cluster_weight{0};
          parallel_chunks(
              pool, members_begin, members_end, 16,
              [&](const int worker, const std::uint64_t lo, const std::uint64_t hi) {
                FixedCapacityRatingMap &map = *maps[worker];
                VertexWeight local_weight = 0;
                for (std::uint64_t s = lo; s < hi; ++s) {
                  const VertexId u = buckets[s];
                  local_weight = checked_add(local_weight, g.vertex_weight(u));
                  g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
                    const ClusterId d = c.cluster_of(v);
                    if (d == a) {
                      return;
                    }
                    map.add(d, w);
                    if (map.size() >= config.t_bump) {
                      array.flush(map, worker);
                    }
                  });
                }
                cluster_weight.fetch_add(local_weight, std::memory_order_relaxed);
              }
          );
          for (int w = 0; w < pool.workers(); ++w) {
            array.flush(*maps[w], w);
          }
          std::size_t degree = 0;
          array.for_each_nonzero([&](std::uint32_t, EdgeWeight) { ++degree; });
          if (!buffer.fits(degree)) {
            buffer.flush_sequential(counter, target_out.data(), weight_out.data(),
                                    offset_out.data(), coarse_weights.data(),
                                    result.mapping.cluster_to_coarse.data(), stats_ptr);
          }
          if (degree > config.buffer_capacity) {
            const auto [arc_begin, vertex_begin] = counter.advance_sequential(degree, 1);
            const auto coarse = static_cast<VertexId>(vertex_begin);
            offset_out[coarse] = arc_begin;
            coarse_weights[coarse] = cluster_weight.load();
            result.mapping.cluster_to_coarse[a] = coarse;
            EdgeId e = arc_begin;
            array.for_each_nonzero([&](const std::uint32_t d, const EdgeWeight w) {
              target_out.data()[e] = d;
              weight_out.data()[e] = w;
              ++e;
            });
            if (stats_ptr != nullptr) {
              stats_ptr->transactions.push_back({arc_begin, degree, vertex_begin, 1});
            }
          } else {
            buffer.begin_neighborhood(a, cluster_weight.load());
            array.for_each_nonzero([&](const std::uint32_t d, const EdgeWeight w) {
              buffer.push_arc(d, w);
            });
          }
          array.reset();
        }
      }
      buffer.flush_sequential(counter, target_out.data(), weight_out.data(), offset_out.data(),
                              coarse_weights.data(), result.mapping.cluster_to_coarse.data(),
                              stats_ptr);
    }
  }

  const auto [total_arcs, total_vertices] = counter.load();
  if (total_vertices != coarse_n) {
    throw std::logic_error("contraction finalized an unexpected number of coarse vertices");
  }
  if (total_arcs > fine_arcs) {
    throw std::logic_error("coarse arcs exceeded the reservation");
  }
  target_out.commit_up_to(total_arcs);
  weight_out.commit_up_to(total_arcs);
  result.stats.committed_arcs = total_arcs;
  offset_out[coarse_n] = total_arcs;

  remap_targets(
      {target_out.data(), total_arcs},
      {result.mapping.cluster_to_coarse.data(), result.mapping.cluster_to_coarse.size()}, pool
  );
  parallel_for(pool, 0, n, [&](int, const std::uint64_t u) {
    result.mapping.fine_to_coarse[u] =
        result.mapping.cluster_to_coarse[c.cluster_of(static_cast<VertexId>(u))];
  });

  result.coarse = Graph(
      std::move(offset_out), OwnedArray<VertexId>(std::move(target_out)),
      OwnedArray<EdgeWeight>(std::move(weight_out)), std::move(coarse_weights)
  );
  return result;
}

} // namespace leanpart
