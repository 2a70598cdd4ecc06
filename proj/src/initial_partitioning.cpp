#include "leanpart/initial_partitioning.hpp"
#include <sstream>

#include <algorithm>
#include <queue>

#include "leanpart/memory.hpp"
#include "leanpart/rating_map.hpp"

namespace leanpart {

namespace {

EdgeWeight bisection_cut(const Graph &g, const std::vector<std::uint8_t> &side) {
  std::int64_t cut = 0;
  for (VertexId u = 0; u < g.n(); ++u) {
    g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
      if (side[u] != side[v]) {
        cut += w;
      }
    });
  }
  return cut / 2;
}

} // namespace

Bisection greedy_graph_growing(
    const Graph &g, const VertexWeight budget0, const VertexWeight budget1, std::mt19937_64 &rng,
    const VertexWeight target0
) {
  const VertexWeight total = g.total_vertex_weight();
  if (budget0 + budget1 < total) {
    throw std::invalid_argument("bisection budgets below the total weight");
  }
  const VertexId n = g.n();
  Bisection b;
  b.side.assign(n, 1);
  b.side_weight[1] = total;

  // Side 0 must reach at least total - budget1 for feasibility and aims for
  // its share (half by default) without overshooting its own budget.
  const VertexWeight share = target0 > 0 ? target0 : (total + 1) / 2;
  const VertexWeight target =
      std::max<VertexWeight>(total - budget1, std::min<VertexWeight>(share, budget0));

  // attachment = weight to side 0 minus weight to side 1; lazy max-heap.
  std::vector<EdgeWeight> incident(n, 0);
  for (VertexId u = 0; u < n; ++u) {
    g.neighbors(u, [&](EdgeId, VertexId, const EdgeWeight w) { incident[u] += w; });
  }
  std::vector<EdgeWeight> attachment(n, 0);
  std::vector<std::uint8_t> in_frontier(n, 0);
  std::priority_queue<std::pair<EdgeWeight, VertexId>> frontier;

  const auto absorb = [&](const VertexId u) {
    b.side[u] = 0;
    b.side_weight[0] += g.vertex_weight(u);
    b.side_weight[1] -= g.vertex_weight(u);
    g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
      if (b.side[v] == 1) {
        if (in_frontier[v] == 0) {
          in_frontier[v] = 1;
          attachment[v] = 2 * w - incident[v];
        } else {
          attachment[v] += 2 * w; // one more edge flipped to internal
        }
        frontier.emplace(attachment[v], v);
      }
    });
  };

  std::uniform_int_distribution<VertexId> pick(0, n > 0 ? n - 1 : 0);
  while (b.side_weight[0] < target) {
    VertexId next = kInvalidVertex;
    while (!frontier.empty()) {
      const auto [gain, v] = frontier.top();
      frontier.pop();
      if (b.side[v] == 1 && gain == attachment[v] &&
          b.side_weight[0] + g.vertex_weight(v) <= budget0) {
        next = v;
        break;
      }
    }
    if (next == kInvalidVertex) {
      // Frontier exhausted or over budget: restart from a random vertex.
      for (VertexId tries = 0; tries < n; ++tries) {
        const VertexId v = pick(rng);
        if (b.side[v] == 1 && b.side_weight[0] + g.vertex_weight(v) <= budget0) {
          next = v;
          break;
        }
      }
      if (next == kInvalidVertex) {
        for (VertexId v = 0; v < n && next == kInvalidVertex; ++v) {
          if (b.side[v] == 1 && b.side_weight[0] + g.vertex_weight(v) <= budget0) {
            next = v;
          }
        }
      }
      if (next == kInvalidVertex) {
        break; // nothing fits side 0 anymore
      }
    }
    absorb(next);
  }

  b.cut = bisection_cut(g, b.side);
  b.feasible = b.side_weight[0] <= budget0 && b.side_weight[1] <= budget1;
  return b;
}

void fm2way(
    const Graph &g,
    Bisection &b,
    const VertexWeight budget0,
    const VertexWeight budget1,
    const int max_passes
) {
  const VertexId n = g.n();
  std::vector<EdgeWeight> gain(n, 0);
  std::vector<std::uint8_t> locked(n, 0);
  // One lazy heap per side; moves may overshoot a budget by at most the
  // heaviest vertex while the pass runs, the committed prefix may not.
  std::priority_queue<std::pair<EdgeWeight, VertexId>> heap[2];
  const VertexWeight budgets[2] = {budget0, budget1};
  VertexWeight allowance = 0;
  for (VertexId u = 0; u < n; ++u) {
    allowance = std::max(allowance, g.vertex_weight(u));
  }

  struct Move {
    VertexId vertex;
    EdgeWeight gain;
  };
  std::vector<Move> moves;
  moves.reserve(n);

  for (int pass = 0; pass < max_passes; ++pass) {
    std::fill(locked.begin(), locked.end(), 0);
    for (int side = 0; side < 2; ++side) {
      while (!heap[side].empty()) {
        heap[side].pop();
      }
    }
    for (VertexId u = 0; u < n; ++u) {
      EdgeWeight external = 0;
      EdgeWeight internal = 0;
      g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
        (b.side[u] == b.side[v] ? internal : external) += w;
      });
      gain[u] = external - internal;
      heap[b.side[u]].emplace(gain[u], u);
    }

    moves.clear();
    EdgeWeight gain_sum = 0;
    EdgeWeight best_gain = 0;
    std::size_t best_prefix = 0; // earliest prefix wins ties
    const auto feasible_now = [&] {
      return b.side_weight[0] <= budget0 && b.side_weight[1] <= budget1;
    };

    // Drops stale and locked entries, then reports the best movable vertex
    // of the side, honoring the relaxed mid-pass budget. Vertices too heavy
    // for the other side right now are parked until the balance shifts.
    std::vector<std::pair<EdgeWeight, VertexId>> parked[2];
    const auto fresh_top = [&](const int side, VertexId &vertex) {
      auto &q = heap[side];
      while (!q.empty()) {
        const auto [g_at_push, u] = q.top();
        if (locked[u] != 0 || b.side[u] != side || g_at_push != gain[u]) {
          q.pop();
          continue;
        }
        if (b.side_weight[1 - side] + g.vertex_weight(u) > budgets[1 - side] + allowance) {
          parked[side].push_back(q.top());
          q.pop();
          continue;
        }
        vertex = u;
        return true;
      }
      return false;
    };

    while (true) {
      VertexId candidate[2];
      const bool movable0 = fresh_top(0, candidate[0]);
      const bool movable1 = fresh_top(1, candidate[1]);
      if (!movable0 && !movable1) {
        break;
      }
      int side;
      if (movable0 && movable1) {
        const EdgeWeight g0 = gain[candidate[0]];
        const EdgeWeight g1 = gain[candidate[1]];
        if (g0 != g1) {
          side = g0 > g1 ? 0 : 1;
        } else {
          // Prefer draining the heavier side.
          side = b.side_weight[1] > b.side_weight[0] ? 1 : 0;
        }
      } else {
        side = movable0 ? 0 : 1;
      }
      const VertexId u = candidate[side];
      heap[side].pop();

      const auto from = static_cast<std::uint8_t>(side);
      const std::uint8_t to = 1 - from;
      b.side[u] = to;
      b.side_weight[from] -= g.vertex_weight(u);
      b.side_weight[to] += g.vertex_weight(u);
      locked[u] = 1;
      gain_sum += gain[u];
      moves.push_back({u, gain[u]});
      g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
        if (locked[v] != 0) {
          return;
        }
        gain[v] += (b.side[v] == from) ? 2 * w : -2 * w;
        heap[b.side[v]].emplace(gain[v], v);
      });
      if (gain_sum > best_gain && feasible_now()) {
        best_gain = gain_sum;
        best_prefix = moves.size();
      }
      for (int s = 0; s < 2; ++s) {
        for (const auto &entry : parked[s]) {
          heap[s].push(entry);
        }
        parked[s].clear();
      }
    }

    // Roll back to the best feasible prefix.
    for (std::size_t i = moves.size(); i > best_prefix; --i) {
      const VertexId u = moves[i - 1].vertex;
      const std::uint8_t from = b.side[u];
      const std::uint8_t to = 1 - from;
      b.side[u] = to;
      b.side_weight[from] -= g.vertex_weight(u);
      b.side_weight[to] += g.vertex_weight(u);
    }
    if (best_gain <= 0) {
      break;
    }
  }
  b.cut = bisection_cut(g, b.side);
  b.feasible = b.side_weight[0] <= budget0 && b.side_weight[1] <= budget1;
}

namespace {

struct Subgraph {
  Graph graph;
  std::vector<VertexId> original; // local id -> vertex id in the parent
};

Subgraph induced_subgraph(const Graph &g, const std::vector<VertexId> &vertices) {
  Subgraph sub;
  sub.original = vertices;
  std::vector<VertexId> local(g.n(), kInvalidVertex);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    local[vertices[i]] = static_cast<VertexId>(i);
  }
  std::vector<EdgeId> offsets(vertices.size() + 1, 0);
  std::vector<VertexWeight> weights(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    weights[i] = g.vertex_weight(vertices[i]);
    EdgeId degree = 0;
    g.neighbors(vertices[i], [&](EdgeId, const VertexId v, EdgeWeight) {
      degree += local[v] != kInvalidVertex ? 1 : 0;
    });
    offsets[i + 1] = offsets[i] + degree;
  }
  std::vector<VertexId> targets(offsets.back());
  std::vector<EdgeWeight> edge_weights(offsets.back());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    EdgeId e = offsets[i];
    g.neighbors(vertices[i], [&](EdgeId, const VertexId v, const EdgeWeight w) {
      if (local[v] != kInvalidVertex) {
        targets[e] = local[v];
        edge_weights[e] = w;
        ++e;
      }
    });
  }
  sub.graph = Graph(std::move(offsets), std::move(targets), std::move(edge_weights), std::move(weights));
  return sub;
}

VertexWeight scaled_budget(
    const VertexWeight subset_weight,
    const BlockId side_k,
    const BlockId node_k,
    const double epsilon_inflated,
    const VertexWeight global_block_budget,
    const VertexWeight heaviest_vertex
) {
  const auto eps_ppb = static_cast<std::int64_t>(epsilon_inflated * 1e9);
  const auto numer =
      static_cast<__int128>(subset_weight) * side_k * (1000000000LL + eps_ppb);
  const auto denom = static_cast<__int128>(node_k) * 1000000000LL;
  const auto ceiling = static_cast<VertexWeight>((numer + denom - 1) / denom);
  // The heaviest vertex must fit on either side (it is at most the global
  // per-block budget), and capping at side_k per-block budgets keeps every
  // leaf inside the global balance constraint.
  return std::min<VertexWeight>(
      std::max(ceiling, heaviest_vertex), static_cast<VertexWeight>(side_k) * global_block_budget
  );
}

struct BisectionJob {
  const Graph *graph;
  VertexWeight budget0;
  VertexWeight budget1;
  VertexWeight target0; // proportional share of side 0
  int fm_passes;
  std::uint64_t seed;
};

// Last resort when every randomized run fails: first-fit-decreasing into
// the side with more remaining room; feasible whenever the weights pack.
Bisection first_fit_bisection(const Graph &g, const VertexWeight budget0, const VertexWeight budget1) {
  const VertexId n = g.n();
  std::vector<VertexId> order(n);
  for (VertexId u = 0; u < n; ++u) {
    order[u] = u;
  }
  std::sort(order.begin(), order.end(), [&](const VertexId a, const VertexId b) {
    return g.vertex_weight(a) > g.vertex_weight(b);
  });
  Bisection b;
  b.side.assign(n, 1);
  const VertexWeight budgets[2] = {budget0, budget1};
  for (const VertexId u : order) {
    const int side =
        budgets[0] - b.side_weight[0] >= budgets[1] - b.side_weight[1] ? 0 : 1;
    b.side[u] = static_cast<std::uint8_t>(side);
    b.side_weight[side] += g.vertex_weight(u);
  }
  b.cut = bisection_cut(g, b.side);
  b.feasible = b.side_weight[0] <= budget0 && b.side_weight[1] <= budget1;
  return b;
}

// Exact fallback for weight-tight nodes (e.g. both budgets equal to half
// the total): subset-sum DP over the vertex weights picks a side-0 set
// whose weight is feasible and closest to the target. Quality is left to
// the FM pass that follows.
Bisection subset_sum_bisection(
    const Graph &g, const VertexWeight budget0, const VertexWeight budget1, const VertexWeight target0
) {
  const VertexWeight total = g.total_vertex_weight();
  const VertexId n = g.n();
  Bisection b;
  b.side.assign(n, 1);
  b.side_weight[1] = total;
  const auto limit = static_cast<std::size_t>(std::min<VertexWeight>(budget0, total));
  std::vector<std::int32_t> setter(limit + 1, -1);
  std::vector<VertexWeight> predecessor(limit + 1, 0);
  setter[0] = n; // sentinel: empty set
  for (VertexId i = 0; i < n; ++i) {
    const VertexWeight w = g.vertex_weight(i);
    // Descending scan keeps each vertex usable at most once.
    for (std::int64_t s = static_cast<std::int64_t>(limit); s >= w; --s) {
      if (setter[s] < 0 && setter[s - w] >= 0) {
        setter[s] = static_cast<std::int32_t>(i);
        predecessor[s] = s - w;
      }
    }
  }
  const VertexWeight low = std::max<VertexWeight>(0, total - budget1);
  VertexWeight best_sum = -1;
  for (VertexWeight s = 0; s <= static_cast<VertexWeight>(limit); ++s) {
    if (setter[s] < 0 || s < low) {
      continue;
    }
    if (best_sum < 0 || std::llabs(s - target0) < std::llabs(best_sum - target0)) {
      best_sum = s;
    }
  }
  if (best_sum < 0) {
    b.feasible = false;
    return b;
  }
  VertexWeight s = best_sum;
  while (s > 0) {
    const std::int32_t item = setter[s];
    b.side[item] = 0;
    s = predecessor[s];
  }
  b.side_weight[0] = best_sum;
  b.side_weight[1] = total - best_sum;
  b.cut = bisection_cut(g, b.side);
  b.feasible = b.side_weight[0] <= budget0 && b.side_weight[1] <= budget1;
  return b;
}

Bisection best_of_portfolio(const BisectionJob &job, const int portfolio, WorkerPool &pool) {
  std::vector<Bisection> results(portfolio);
  parallel_for(pool, 0, portfolio, [&](int, const std::uint64_t member) {
    std::mt19937_64 rng(mix64(job.seed + member));
    Bisection b = greedy_graph_growing(*job.graph, job.budget0, job.budget1, rng, job.target0);
    fm2way(*job.graph, b, job.budget0, job.budget1, job.fm_passes);
    results[member] = std::move(b);
  });
  int best = -1;
  for (int i = 0; i < portfolio; ++i) {
    if (!results[i].feasible) {
      continue;
    }
    if (best < 0 || results[i].cut < results[best].cut) {
      best = i;
    }
  }
  if (best < 0) {
    Bisection fallback = first_fit_bisection(*job.graph, job.budget0, job.budget1);
    if (!fallback.feasible && job.graph->total_vertex_weight() <= (1 << 22)) {
      fallback = subset_sum_bisection(*job.graph, job.budget0, job.budget1, job.target0);
    }
    if (!fallback.feasible) {
      std::ostringstream what;
      what << "no feasible bisection found by the portfolio (n " << job.graph->n() << ", weight "
           << job.graph->total_vertex_weight() << ", heaviest "
           << job.graph->max_vertex_weight() << ", budgets " << job.budget0 << "/" << job.budget1
           << ")";
      throw InfeasibleInstanceError(what.str());
    }
    fm2way(*job.graph, fallback, job.budget0, job.budget1, job.fm_passes);
    return fallback;
  }
  return std::move(results[best]);
}

void recurse(
    const Graph &g,
    const std::vector<VertexId> &vertices,
    const BlockId block_offset,
    const BlockId k,
    const int depth,
    const double epsilon,
    const VertexWeight global_block_budget,
    const InitialPartitionConfig &config,
    WorkerPool &pool,
    Partition &out
) {
  if (k == 1) {
    for (const VertexId u : vertices) {
      out.set_block(u, block_offset);
    }
    return;
  }
  const Subgraph sub = induced_subgraph(g, vertices);
  const BlockId k0 = (k + 1) / 2;
  const BlockId k1 = k / 2;
  const double eps_inflated = epsilon + 0.01 * depth;
  const VertexWeight subset_weight = sub.graph.total_vertex_weight();
  const VertexWeight heaviest = sub.graph.max_vertex_weight();
  const VertexWeight budget0 =
      scaled_budget(subset_weight, k0, k, eps_inflated, global_block_budget, heaviest);
  const VertexWeight budget1 =
      scaled_budget(subset_weight, k1, k, eps_inflated, global_block_budget, heaviest);

  const auto proportional =
      static_cast<VertexWeight>(static_cast<__int128>(subset_weight) * k0 / k);
  BisectionJob job{
      &sub.graph, budget0, budget1, proportional, config.fm_passes,
      mix64(config.seed ^ (static_cast<std::uint64_t>(block_offset) << 24) ^ k)
  };
  const Bisection bisection = best_of_portfolio(job, config.portfolio_size, pool);

  std::vector<VertexId> left;
  std::vector<VertexId> right;
  left.reserve(vertices.size());
  right.reserve(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    (bisection.side[i] == 0 ? left : right).push_back(vertices[i]);
  }
  recurse(g, left, block_offset, k0, depth + 1, epsilon, global_block_budget, config, pool, out);
  recurse(g, right, block_offset + k0, k1, depth + 1, epsilon, global_block_budget, config, pool, out);
}

} // namespace

Partition initial_partition(
    const Graph &g,
    const BlockId k,
    const double epsilon,
    const InitialPartitionConfig &config,
    WorkerPool &pool
) {
  if (k == 0) {
    throw std::invalid_argument("k must be at least 1");
  }
  Partition p(g.n(), k, epsilon, g.total_vertex_weight(), g.max_vertex_weight());
  if (k == 1 || g.n() == 0) {
    p.rebuild_block_weights(g);
    return p;
  }
  std::vector<VertexId> vertices(g.n());
  for (VertexId u = 0; u < g.n(); ++u) {
    vertices[u] = u;
  }
  recurse(g, vertices, 0, k, 0, epsilon, p.max_block_weight(), config, pool, p);
  p.rebuild_block_weights(g);
  if (!p.is_balanced()) {
    // Repair: move the lightest vertices out of overweight blocks into the
    // blocks with the most headroom.
    std::vector<std::vector<VertexId>> members(k);
    for (VertexId u = 0; u < g.n(); ++u) {
      members[p.block_of(u)].push_back(u);
    }
    for (BlockId b = 0; b < k; ++b) {
      if (p.block_weight(b) <= p.max_block_weight()) {
        continue;
      }
      std::sort(members[b].begin(), members[b].end(), [&](const VertexId a, const VertexId c) {
        return g.vertex_weight(a) < g.vertex_weight(c);
      });
      for (const VertexId u : members[b]) {
        if (p.block_weight(b) <= p.max_block_weight()) {
          break;
        }
        BlockId lightest = b;
        for (BlockId t = 0; t < k; ++t) {
          if (t != b && p.block_weight(t) < p.block_weight(lightest)) {
            lightest = t;
          }
        }
        if (lightest == b ||
            p.block_weight(lightest) + g.vertex_weight(u) > p.max_block_weight()) {
          break;
        }
        p.add_block_weight(b, -g.vertex_weight(u));
        p.add_block_weight(lightest, g.vertex_weight(u));
        p.set_block(u, lightest);
      }
    }
  }
  if (!p.is_balanced()) {
    throw InfeasibleInstanceError("recursive bisection produced an infeasible partition");
  }
  return p;
}

} // namespace leanpart
