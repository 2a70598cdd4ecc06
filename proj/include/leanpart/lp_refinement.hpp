/*******************************************************************************
 * Size-constrained label propagation refinement of a k-way partition: each
 * vertex moves to the adjacent block with the strongest connection if that
 * strictly beats its current block and the block has room.
 ******************************************************************************/
#pragma once

#include <random>
#include <span>

#include "leanpart/graph.hpp"
#include "leanpart/memory.hpp"
#include "leanpart/parallel.hpp"
#include "leanpart/partition.hpp"
#include "leanpart/rating_map.hpp"

namespace leanpart {

struct LpRefinementConfig {
  int rounds = 5;
  std::uint64_t t_bump = 10000;
  std::uint64_t seed = 1;
  bool deterministic = false;
};

struct LpRefineResult {
  VertexId moved = 0;
  int rounds_run = 0;
  EdgeWeight cut = 0;
};

namespace detail {

template <GraphLike G>
bool refine_decide_and_move(
    const G &g,
    Partition &p,
    const VertexId u,
    const auto &ratings,
    const bool deterministic,
    const std::uint64_t round_seed
) {
  const BlockId current = p.block_of(u);
  const VertexWeight weight = g.vertex_weight(u);
  const EdgeWeight own_rating = ratings.lookup(current);
  BlockId best = current;
  EdgeWeight best_rating = own_rating;
  const std::uint64_t tie_base = deterministic ? 0 : mix64(round_seed ^ u);

  ratings.for_each([&](const std::uint32_t block, const EdgeWeight rating) {
    if (block == current || rating < best_rating) {
      return;
    }
    if (rating == best_rating) {
      if (best == current) {
        return; // zero-gain moves are not taken
      }
      const bool wins =
          deterministic ? block < best : mix64(tie_base ^ block) > mix64(tie_base ^ best);
      if (!wins) {
        return;
      }
    }
    if (p.block_weight(block) + weight > p.max_block_weight()) {
      return;
    }
    best = block;
    best_rating = rating;
  });

  if (best == current || best_rating <= own_rating) {
    return false;
  }
  if (!p.try_reserve(best, weight)) {
    return false;
  }
  p.add_block_weight(current, -weight);
  p.set_block(u, best);
  return true;
}

} // namespace detail

// One refinement round over `order`; returns the number of committed moves.
// Vertices whose distinct adjacent block count reaches t_bump are deferred
// to a sequential second phase over a k-sized sparse array.
template <GraphLike G>
VertexId lp_refine_round(
    const G &g,
    Partition &p,
    std::span<const VertexId> order,
    const LpRefinementConfig &config,
    WorkerPool &pool,
    const std::uint64_t round_seed
) {
  const int workers = pool.workers();
  const std::uint64_t t_bump = std::max<std::uint64_t>(2, config.t_bump);
  // Distinct adjacent blocks are bounded by k, so the map never needs more.
  const std::uint64_t capacity = 2 * (std::min<std::uint64_t>(t_bump, p.k()) + 1);
  std::vector<std::unique_ptr<FixedCapacityRatingMap>> maps;
  for (int w = 0; w < workers; ++w) {
    maps.push_back(std::make_unique<FixedCapacityRatingMap>(capacity));
  }
  std::vector<memory::aux_vector<VertexId>> bump_lists(workers);
  std::atomic<VertexId> moved{0};

  parallel_chunks(
      pool, 0, order.size(), std::max<std::uint64_t>(64, order.size() / (16 * workers)),
      [&](const int worker, const std::uint64_t lo, const std::uint64_t hi) {
        FixedCapacityRatingMap &map = *maps[worker];
        VertexId local_moved = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
          const VertexId u = order[i];
          bool bumped = false;
          g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
            if (bumped) {
              return;
            }
            map.add(p.block_of(v), w);
            if (map.size() >= t_bump) {
              bumped = true;
            }
          });
          if (bumped) {
            bump_lists[worker].push_back(u);
          } else if (detail::refine_decide_and_move(g, p, u, map, config.deterministic, round_seed)) {
            ++local_moved;
          }
          map.clear();
        }
        moved.fetch_add(local_moved, std::memory_order_relaxed);
      }
  );

  VertexId total_bumped = 0;
  for (const auto &list : bump_lists) {
    total_bumped += list.size();
  }
  if (total_bumped > 0) {
    SparseRatingArray array(p.k(), workers);
    for (const auto &list : bump_lists) {
      for (const VertexId u : list) {
        g.neighbors_parallel(u, pool, [&](const int worker, EdgeId, const VertexId v, const EdgeWeight w) {
          FixedCapacityRatingMap &map = *maps[worker];
          map.add(p.block_of(v), w);
          if (map.size() >= t_bump) {
            array.flush(map, worker);
          }
        });
        for (int w = 0; w < workers; ++w) {
          array.flush(*maps[w], w);
        }

        const BlockId current = p.block_of(u);
        const VertexWeight weight = g.vertex_weight(u);
        const EdgeWeight own_rating = array.value(current);
        BlockId best = current;
        EdgeWeight best_rating = own_rating;
        const std::uint64_t tie_base = config.deterministic ? 0 : mix64(round_seed ^ u);
        array.for_each_nonzero([&](const std::uint32_t block, const EdgeWeight rating) {
          if (block == current || rating < best_rating) {
            return;
          }
          if (rating == best_rating) {
            if (best == current) {
              return;
            }
            const bool wins = config.deterministic
                                  ? block < best
                                  : mix64(tie_base ^ block) > mix64(tie_base ^ best);
            if (!wins) {
              return;
            }
          }
          if (p.block_weight(block) + weight > p.max_block_weight()) {
            return;
          }
          best = block;
          best_rating = rating;
        });
        if (best != current && best_rating > own_rating && p.try_reserve(best, weight)) {
          p.add_block_weight(current, -weight);
          p.set_block(u, best);
          moved.fetch_add(1, std::memory_order_relaxed);
        }
        array.reset();
      }
    }
  }
  return moved.load();
}

// Runs up to config.rounds refinement rounds with reshuffled visit orders;
// stops early on a zero-move round. The partition stays balanced; the
// returned cut is recomputed from scratch.
template <GraphLike G>
LpRefineResult lp_refine(const G &g, Partition &p, const LpRefinementConfig &config, WorkerPool &pool) {
  LpRefineResult result;
  memory::aux_vector<VertexId> order(g.n());
  for (VertexId u = 0; u < g.n(); ++u) {
    order[u] = u;
  }
  std::mt19937_64 rng(config.seed);
  for (int round = 0; round < config.rounds; ++round) {
    std::shuffle(order.begin(), order.end(), rng);
    const std::uint64_t round_seed = mix64(config.seed ^ (0x5EEDull + round));
    const VertexId moved =
        lp_refine_round(g, p, {order.data(), order.size()}, config, pool, round_seed);
    result.moved += moved;
    ++result.rounds_run;
    if (moved == 0) {
      break;
    }
  }
  result.cut = edge_cut(g, p, &pool);
  return result;
}

} // namespace leanpart
