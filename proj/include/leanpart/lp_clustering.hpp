/*******************************************************************************
 * Size-constrained label propagation clustering for coarsening. The
 * two-phase round processes vertices in parallel with small fixed-capacity
 * rating maps and defers vertices with too many distinct neighbor clusters
 * to a sequential-but-edge-parallel second phase over one shared sparse
 * array, cutting the auxiliary memory from O(n p) to O(n).
 ******************************************************************************/
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>

#include "leanpart/clustering.hpp"
#include "leanpart/graph.hpp"
#include "leanpart/memory.hpp"
#include "leanpart/parallel.hpp"
#include "leanpart/rating_map.hpp"

namespace leanpart {

struct LpConfig {
  int rounds = 5;
  std::uint64_t t_bump = 10000;
  std::uint64_t seed = 1;
  bool deterministic = false; // smallest-ID tie break instead of random draws
  enum class Strategy {
    kTwoPhase,       // bounded maps + one shared sparse array
    kPerWorkerArray, // dense length-n rating array per worker (baseline)
  };
  Strategy strategy = Strategy::kTwoPhase;
  double min_shrink = 1.05; // below this, the singleton fallback kicks in
};

struct LpRoundResult {
  VertexId moved = 0;
  VertexId bumped = 0;
};

namespace detail {

// Argmax over the accumulated ratings with the size constraint; the current
// cluster participates with its own rating and is always allowed. Commits
// via compare-and-reserve, so a raced-full target makes the vertex stay.
template <GraphLike G, typename RatingMapT>
bool lp_decide_and_move(
    const G &g,
    Clustering &c,
    const VertexId u,
    const RatingMapT &ratings,
    const bool deterministic,
    const std::uint64_t round_seed
) {
  const ClusterId current = c.cluster_of(u);
  const VertexWeight weight = g.vertex_weight(u);
  ClusterId best = current;
  EdgeWeight best_rating = ratings.lookup(current);
  const std::uint64_t tie_base = deterministic ? 0 : mix64(round_seed ^ u);

  ratings.for_each([&](const std::uint32_t cluster, const EdgeWeight rating) {
    if (cluster == current || rating < best_rating) {
      return;
    }
    if (rating == best_rating) {
      // A tie against the current cluster is a zero-gain move: taken only
      // in deterministic mode (canonical smallest-ID argmax); randomized
      // ties would make tied vertices churn without converging.
      const bool wins = deterministic
                            ? cluster < best
                            : best != current && mix64(tie_base ^ cluster) > mix64(tie_base ^ best);
      if (!wins) {
        return;
      }
    }
    if (c.cluster_weight(cluster) + weight > c.max_cluster_weight()) {
      return;
    }
    best = cluster;
    best_rating = rating;
  });

  if (best == current) {
    return false;
  }
  if (!c.try_reserve(best, weight)) {
    return false;
  }
  c.release(current, weight);
  c.set_cluster(u, best);
  return true;
}

} // namespace detail

// One round per the original formulation: sequential, a full rating map per
// vertex, deterministic given the visit order. Serves as the oracle against
// the two-phase round.
template <GraphLike G>
VertexId lp_round_reference(const G &g, Clustering &c, std::span<const VertexId> order) {
  VertexId moved = 0;
  std::map<ClusterId, EdgeWeight> ratings;
  for (const VertexId u : order) {
    ratings.clear();
    g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
      ratings[c.cluster_of(v)] += w;
    });
    const ClusterId current = c.cluster_of(u);
    const VertexWeight weight = g.vertex_weight(u);
    ClusterId best = current;
    EdgeWeight best_rating = 0;
    if (const auto it = ratings.find(current); it != ratings.end()) {
      best_rating = it->second;
    }
    for (const auto &[cluster, rating] : ratings) {
      if (cluster == current) {
        continue;
      }
      if (c.cluster_weight(cluster) + weight > c.max_cluster_weight()) {
        continue;
      }
      if (rating > best_rating || (rating == best_rating && cluster < best)) {
        best = cluster;
        best_rating = rating;
      }
    }
    if (best != current && c.try_reserve(best, weight)) {
      c.release(current, weight);
      c.set_cluster(u, best);
      ++moved;
    }
  }
  return moved;
}

// One two-phase round. Phase one visits `order` in parallel and bumps a
// vertex as soon as its distinct-cluster count reaches t_bump; phase two
// handles the bumped vertices one at a time with edge-parallel aggregation
// into the shared sparse array.
template <GraphLike G>
LpRoundResult lp_round_two_phase(
    const G &g,
    Clustering &c,
    std::span<const VertexId> order,
    const std::uint64_t t_bump_in,
    WorkerPool &pool,
    const bool deterministic = false,
    const std::uint64_t round_seed = 0
) {
  const std::uint64_t t_bump = std::max<std::uint64_t>(2, t_bump_in);
  const int workers = pool.workers();

  std::vector<std::unique_ptr<FixedCapacityRatingMap>> maps;
  maps.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    maps.push_back(std::make_unique<FixedCapacityRatingMap>(2 * t_bump));
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
            map.add(c.cluster_of(v), w);
            if (map.size() >= t_bump) {
              bumped = true;
            }
          });
          if (bumped) {
            bump_lists[worker].push_back(u);
          } else if (detail::lp_decide_and_move(g, c, u, map, deterministic, round_seed)) {
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
    SparseRatingArray array(c.n(), workers);
    for (const auto &list : bump_lists) {
      for (const VertexId u : list) {
        g.neighbors_parallel(u, pool, [&](const int worker, EdgeId, const VertexId v, const EdgeWeight w) {
          FixedCapacityRatingMap &map = *maps[worker];
          map.add(c.cluster_of(v), w);
          if (map.size() >= t_bump) {
            array.flush(map, worker);
          }
        });
        for (int w = 0; w < workers; ++w) {
          array.flush(*maps[w], w);
        }

        const ClusterId current = c.cluster_of(u);
        const VertexWeight weight = g.vertex_weight(u);
        ClusterId best = current;
        EdgeWeight best_rating = array.value(current);
        const std::uint64_t tie_base = deterministic ? 0 : mix64(round_seed ^ u);
        array.for_each_nonzero([&](const std::uint32_t cluster, const EdgeWeight rating) {
          if (cluster == current || rating < best_rating) {
            return;
          }
          if (rating == best_rating) {
            const bool wins =
                deterministic
                    ? cluster < best
                    : best != current && mix64(tie_base ^ cluster) > mix64(tie_base ^ best);
            if (!wins) {
              return;
            }
          }
          if (c.cluster_weight(cluster) + weight > c.max_cluster_weight()) {
            return;
          }
          best = cluster;
          best_rating = rating;
        });
        if (best != current && c.try_reserve(best, weight)) {
          c.release(current, weight);
          c.set_cluster(u, best);
          moved.fetch_add(1, std::memory_order_relaxed);
        }
        array.reset();
      }
    }
  }
  return {moved.load(), total_bumped};
}

// Baseline round with a dense length-n rating array per worker; memory
// scales with the worker count. Kept for the footprint comparison.
template <GraphLike G>
VertexId lp_round_per_worker_dense(
    const G &g,
    Clustering &c,
    std::span<const VertexId> order,
    WorkerPool &pool,
    const bool deterministic = false,
    const std::uint64_t round_seed = 0
) {
  const int workers = pool.workers();
  std::vector<std::unique_ptr<DenseRatingMap>> maps;
  maps.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    maps.push_back(std::make_unique<DenseRatingMap>(c.n()));
  }
  std::atomic<VertexId> moved{0};
  parallel_chunks(
      pool, 0, order.size(), std::max<std::uint64_t>(64, order.size() / (16 * workers)),
      [&](const int worker, const std::uint64_t lo, const std::uint64_t hi) {
        DenseRatingMap &map = *maps[worker];
        VertexId local_moved = 0;
        for (std::uint64_t i = lo; i < hi; ++i) {
          const VertexId u = order[i];
          g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
            map.add(c.cluster_of(v), w);
          });
          if (detail::lp_decide_and_move(g, c, u, map, deterministic, round_seed)) {
            ++local_moved;
          }
          map.clear();
        }
        moved.fetch_add(local_moved, std::memory_order_relaxed);
      }
  );
  return moved.load();
}

VertexId count_distinct_clusters(const Clustering &c);

// Pairs leftover singleton clusters that share a common neighbor cluster,
// greedily under the weight budget. Minimal stand-in for two-hop matching;
// only used when a round barely shrank the graph.
template <GraphLike G>
VertexId singleton_fallback(const G &g, Clustering &c) {
  const VertexId n = g.n();
  memory::aux_vector<VertexId> members(n, 0);
  for (VertexId u = 0; u < n; ++u) {
    ++members[c.cluster_of(u)];
  }
  memory::aux_vector<VertexId> pending(n, kInvalidVertex);
  VertexId merged = 0;
  for (VertexId u = 0; u < n; ++u) {
    const ClusterId cu = c.cluster_of(u);
    if (members[cu] != 1) {
      continue;
    }
    bool done = false;
    g.neighbors(u, [&](EdgeId, const VertexId v, EdgeWeight) {
      if (done) {
        return;
      }
      const ClusterId d = c.cluster_of(v);
      if (d == cu) {
        return;
      }
      const VertexId other = pending[d];
      if (other != kInvalidVertex && other != u && members[c.cluster_of(other)] == 1 &&
          c.cluster_of(other) != cu) {
        const ClusterId target = c.cluster_of(other);
        if (c.try_reserve(target, g.vertex_weight(u))) {
          c.release(cu, g.vertex_weight(u));
          c.set_cluster(u, target);
          --members[cu];
          ++members[target];
          ++merged;
          done = true;
          return;
        }
      }
      pending[d] = u;
    });
  }
  return merged;
}

// Runs `rounds` two-phase rounds from the singleton clustering with a fresh
// random visit order per round, then the singleton fallback if the result
// shrinks the graph by less than min_shrink.
template <GraphLike G>
Clustering cluster_coarsening(
    const G &g,
    const VertexWeight max_cluster_weight,
    const LpConfig &config,
    WorkerPool &pool
) {
  Clustering c = Clustering::singletons(g, max_cluster_weight);
  if (config.rounds <= 0 || g.n() == 0) {
    return c;
  }
  memory::aux_vector<VertexId> order(g.n());
  for (VertexId u = 0; u < g.n(); ++u) {
    order[u] = u;
  }
  std::mt19937_64 rng(config.seed);
  for (int round = 0; round < config.rounds; ++round) {
    std::shuffle(order.begin(), order.end(), rng);
    const std::uint64_t round_seed = mix64(config.seed ^ static_cast<std::uint64_t>(round));
    VertexId moved = 0;
    if (config.strategy == LpConfig::Strategy::kPerWorkerArray) {
      moved = lp_round_per_worker_dense(
          g, c, {order.data(), order.size()}, pool, config.deterministic, round_seed
      );
    } else {
      moved = lp_round_two_phase(
                  g, c, {order.data(), order.size()}, config.t_bump, pool, config.deterministic,
                  round_seed
      )
                  .moved;
    }
    if (moved == 0) {
      break;
    }
  }
  const VertexId distinct = count_distinct_clusters(c);
  if (static_cast<double>(g.n()) / std::max<VertexId>(1, distinct) < config.min_shrink) {
    singleton_fallback(g, c);
  }
  return c;
}

} // namespace leanpart
