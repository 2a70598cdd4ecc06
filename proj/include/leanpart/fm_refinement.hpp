/*******************************************************************************
 * Parallel localized k-way FM refinement on top of a gain provider.
 * Searches are seeded from boundary vertices, own their touched vertices
 * exclusively, apply best-gain feasible moves, and roll back to the best
 * prefix; a per-pass safety net rolls the whole pass back if concurrent
 * searches ever combined into a worse cut.
 ******************************************************************************/
#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <random>

#include "leanpart/graph.hpp"
#include "leanpart/memory.hpp"
#include "leanpart/parallel.hpp"
#include "leanpart/partition.hpp"
#include "leanpart/rating_map.hpp"

namespace leanpart {

struct FmConfig {
  int passes = 3;
  std::uint32_t max_seeds = 0;       // 0: all boundary vertices
  std::uint32_t adjacency_limit = 400; // touched vertices per search
  std::uint64_t seed = 1;
  bool deterministic = false;
};

struct FmResult {
  EdgeWeight initial_cut = 0;
  EdgeWeight final_cut = 0;
  VertexId committed_moves = 0;
  int passes_run = 0;
};

namespace fm_detail {

struct Move {
  std::uint64_t sequence;
  VertexId vertex;
  BlockId from;
  BlockId to;
};

// Best feasible target for v by cached affinity. When no adjacent block is
// admissible, falls back to the lightest feasible block so searches can
// escape zero-affinity plateaus; returns false only if nothing fits.
template <typename Provider>
bool best_move(
    const Provider &provider,
    const Partition &p,
    const VertexId v,
    const VertexWeight weight,
    BlockId &target,
    EdgeWeight &gain
) {
  const BlockId current = p.block_of(v);
  const EdgeWeight own = provider.affinity(v, current);
  bool found = false;
  EdgeWeight best_affinity = 0;
  BlockId best_block = kInvalidBlock;
  provider.for_each_affinity(v, [&](const BlockId block, const EdgeWeight affinity) {
    if (block == current) {
      return;
    }
    if (p.block_weight(block) + weight > p.max_block_weight()) {
      return;
    }
    if (!found || affinity > best_affinity ||
        (affinity == best_affinity && block < best_block)) {
      found = true;
      best_affinity = affinity;
      best_block = block;
    }
  });
  if (!found) {
    VertexWeight lightest = std::numeric_limits<VertexWeight>::max();
    for (BlockId block = 0; block < p.k(); ++block) {
      if (block == current) {
        continue;
      }
      const VertexWeight load = p.block_weight(block);
      if (load + weight <= p.max_block_weight() && load < lightest) {
        lightest = load;
        best_block = block;
        found = true;
      }
    }
    if (!found) {
      return false;
    }
    target = best_block;
    gain = -own;
    return true;
  }
  target = best_block;
  gain = best_affinity - own;
  return true;
}

} // namespace fm_detail

// Boundary vertices: at least one neighbor in a different block.
template <GraphLike G>
memory::aux_vector<VertexId> boundary_vertices(const G &g, const Partition &p, WorkerPool &pool) {
  std::vector<memory::aux_vector<VertexId>> locals(pool.workers());
  parallel_chunks(
      pool, 0, g.n(), std::max<std::uint64_t>(64, g.n() / (8 * pool.workers())),
      [&](const int worker, const std::uint64_t lo, const std::uint64_t hi) {
        for (VertexId u = static_cast<VertexId>(lo); u < hi; ++u) {
          bool boundary = false;
          g.neighbors(u, [&](EdgeId, const VertexId v, EdgeWeight) {
            boundary |= p.block_of(v) != p.block_of(u);
          });
          if (boundary) {
            locals[worker].push_back(u);
          }
        }
      }
  );
  memory::aux_vector<VertexId> out;
  for (auto &list : locals) {
    out.insert(out.end(), list.begin(), list.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// One pass of localized searches. Returns the committed move count.
template <GraphLike G, typename Provider>
VertexId fm_pass(
    const G &g,
    Partition &p,
    Provider &provider,
    const FmConfig &config,
    WorkerPool &pool,
    const std::uint64_t pass_seed,
    std::vector<fm_detail::Move> &committed
) {
  memory::aux_vector<VertexId> seeds = boundary_vertices(g, p, pool);
  if (seeds.empty()) {
    return 0;
  }
  if (!config.deterministic) {
    std::mt19937_64 rng(pass_seed);
    std::shuffle(seeds.begin(), seeds.end(), rng);
  }
  if (config.max_seeds != 0 && seeds.size() > config.max_seeds) {
    seeds.resize(config.max_seeds);
  }

  constexpr std::uint32_t kFree = 0xFFFFFFFFu;
  memory::aux_vector<std::atomic<std::uint32_t>> owner(g.n());
  for (auto &o : owner) {
    o.store(kFree, std::memory_order_relaxed);
  }
  std::atomic<std::size_t> seed_cursor{0};
  std::atomic<std::uint32_t> search_ids{0};
  std::atomic<std::uint64_t> sequence{0};
  std::atomic<VertexId> total_committed{0};
  std::vector<std::vector<fm_detail::Move>> committed_per_worker(pool.workers());

  pool.run([&](const int worker) {
    using Entry = std::tuple<EdgeWeight, VertexId, BlockId>; // (gain, vertex, target)
    std::priority_queue<Entry> queue;
    std::vector<fm_detail::Move> log;
    std::vector<VertexId> claimed;
    std::vector<VertexId> moved_list;

    for (;;) {
      const std::size_t i = seed_cursor.fetch_add(1, std::memory_order_relaxed);
      if (i >= seeds.size()) {
        break;
      }
      const VertexId seed = seeds[i];
      const std::uint32_t my_id = search_ids.fetch_add(1, std::memory_order_relaxed);
      std::uint32_t expected = kFree;
      if (!owner[seed].compare_exchange_strong(expected, my_id, std::memory_order_acq_rel)) {
        continue; // someone else's search currently owns the seed
      }

      while (!queue.empty()) {
        queue.pop();
      }
      log.clear();
      claimed.assign(1, seed);
      moved_list.clear();

      const auto try_push = [&](const VertexId v) {
        BlockId target;
        EdgeWeight gain;
        if (fm_detail::best_move(provider, p, v, g.vertex_weight(v), target, gain)) {
          queue.emplace(gain, v, target);
        }
      };
      try_push(seed);

      EdgeWeight cumulative = 0;
      EdgeWeight best_cumulative = 0;
      std::size_t best_prefix = 0;

      while (!queue.empty()) {
        const auto [stale_gain, v, stale_target] = queue.top();
        queue.pop();
        if (std::find(moved_list.begin(), moved_list.end(), v) != moved_list.end()) {
          continue; // each vertex moves at most once per search
        }
        BlockId target;
        EdgeWeight gain;
        if (!fm_detail::best_move(provider, p, v, g.vertex_weight(v), target, gain)) {
          continue;
        }
        const VertexWeight weight = g.vertex_weight(v);
        const BlockId from = p.block_of(v);
        if (!p.try_reserve(target, weight)) {
          continue;
        }
        p.add_block_weight(from, -weight);
        p.set_block(v, target);
        provider.apply_move(g, v, from, target);
        const std::uint64_t seq = sequence.fetch_add(1, std::memory_order_relaxed);
        log.push_back({seq, v, from, target});
        moved_list.push_back(v);
        cumulative += gain;
        if (cumulative > best_cumulative) {
          best_cumulative = cumulative;
          best_prefix = log.size();
        }

        if (claimed.size() < config.adjacency_limit) {
          g.neighbors(v, [&](EdgeId, const VertexId u, EdgeWeight) {
            if (claimed.size() >= config.adjacency_limit) {
              return;
            }
            std::uint32_t free_slot = kFree;
            if (owner[u].compare_exchange_strong(free_slot, my_id, std::memory_order_acq_rel)) {
              claimed.push_back(u);
              try_push(u);
            }
          });
        }
      }

      // Roll back to the best prefix; every state was feasible, so the
      // prefix itself is.
      for (std::size_t m = log.size(); m > best_prefix; --m) {
        const auto &move = log[m - 1];
        p.add_block_weight(move.to, -g.vertex_weight(move.vertex));
        p.add_block_weight(move.from, g.vertex_weight(move.vertex));
        p.set_block(move.vertex, move.from);
        provider.apply_move(g, move.vertex, move.to, move.from);
      }
      log.resize(best_prefix);
      committed_per_worker[worker].insert(committed_per_worker[worker].end(), log.begin(), log.end());
      total_committed.fetch_add(static_cast<VertexId>(best_prefix), std::memory_order_relaxed);

      // Release this search's claims so later searches can revisit them.
      for (const VertexId u : claimed) {
        owner[u].store(kFree, std::memory_order_release);
      }
    }
  });

  for (auto &list : committed_per_worker) {
    committed.insert(committed.end(), list.begin(), list.end());
  }
  return total_committed.load();
}

// Localized k-way FM: never returns a worse cut than its input, keeps the
// partition balanced and the provider consistent with the partition.
template <GraphLike G, typename Provider>
FmResult fm_refine(const G &g, Partition &p, Provider &provider, const FmConfig &config, WorkerPool &pool) {
  FmResult result;
  result.initial_cut = edge_cut(g, p, &pool);
  EdgeWeight current_cut = result.initial_cut;

  for (int pass = 0; pass < config.passes; ++pass) {
    std::vector<fm_detail::Move> committed;
    const VertexId moves =
        fm_pass(g, p, provider, config, pool, mix64(config.seed ^ (0xF00Dull + pass)), committed);
    ++result.passes_run;
    if (moves == 0) {
      break;
    }
    const EdgeWeight cut_after = edge_cut(g, p, &pool);
    if (cut_after > current_cut || !p.is_balanced()) {
      // Concurrent searches interacted badly (stale gains, or a rollback
      // re-add raced with a reservation); undo the whole pass in reverse
      // commit order, which restores the feasible pre-pass state exactly.
      std::sort(committed.begin(), committed.end(), [](const auto &a, const auto &b) {
        return a.sequence > b.sequence;
      });
      for (const auto &move : committed) {
        p.add_block_weight(move.to, -g.vertex_weight(move.vertex));
        p.add_block_weight(move.from, g.vertex_weight(move.vertex));
        p.set_block(move.vertex, move.from);
        provider.apply_move(g, move.vertex, move.to, move.from);
      }
      break;
    }
    result.committed_moves += moves;
    if (cut_after == current_cut) {
      current_cut = cut_after;
      break;
    }
    current_cut = cut_after;
  }
  result.final_cut = current_cut;
  return result;
}

} // namespace leanpart
