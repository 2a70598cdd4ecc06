#include <doctest.h>

#include <random>

#include "leanpart/initial_partitioning.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace leanpart;
using namespace leanpart::testing;

namespace {

EdgeWeight exhaustive_bisection_optimum(
    const Graph &g, const VertexWeight budget0, const VertexWeight budget1
) {
  REQUIRE(g.n() <= 20);
  EdgeWeight best = std::numeric_limits<EdgeWeight>::max();
  for (std::uint32_t mask = 0; mask < (1u << g.n()); ++mask) {
    VertexWeight w0 = 0;
    std::vector<BlockId> side(g.n());
    for (VertexId u = 0; u < g.n(); ++u) {
      side[u] = (mask >> u) & 1;
      if (side[u] == 0) {
        w0 += g.vertex_weight(u);
      }
    }
    if (w0 > budget0 || g.total_vertex_weight() - w0 > budget1) {
      continue;
    }
    best = std::min(best, brute_force_cut(g, side));
  }
  return best;
}

} // namespace

TEST_CASE("greedy growing bisects a path") {
  const Graph g = path_graph(4);
  // Every seed yields the optimal middle-ish split at these budgets.
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    std::mt19937_64 rng(seed);
    const Bisection b = greedy_graph_growing(g, 2, 2, rng);
    CHECK(b.feasible);
    CHECK(b.cut == 1);
    CHECK(b.side_weight[0] == 2);
  }
}

TEST_CASE("greedy growing on K2 is forced") {
  const Graph g = complete_graph(2);
  std::mt19937_64 rng(1);
  const Bisection b = greedy_graph_growing(g, 1, 1, rng);
  CHECK(b.feasible);
  CHECK(b.cut == 1);
  CHECK(b.side_weight[0] == 1);
  CHECK(b.side_weight[1] == 1);
}

TEST_CASE("greedy growing on an edgeless graph cuts nothing") {
  const Graph g = build_graph(4, {});
  std::mt19937_64 rng(7);
  const Bisection b = greedy_graph_growing(g, 2, 2, rng);
  CHECK(b.feasible);
  CHECK(b.cut == 0);
}

TEST_CASE("greedy growing rejects infeasible budgets") {
  const Graph g = path_graph(4);
  std::mt19937_64 rng(3);
  CHECK_THROWS_AS(greedy_graph_growing(g, 1, 1, rng), std::invalid_argument);
}

TEST_CASE("fm2way recovers the optimum on an alternating path split") {
  const Graph g = path_graph(4);
  Bisection b;
  b.side = {0, 1, 0, 1};
  b.side_weight[0] = 2;
  b.side_weight[1] = 2;
  b.cut = 3;
  b.feasible = true;
  fm2way(g, b, 2, 2, 5);
  CHECK(b.cut == 1);
  CHECK(b.feasible);
  CHECK(exhaustive_bisection_optimum(g, 2, 2) == 1);
}

TEST_CASE("fm2way never worsens an already optimal bisection") {
  const Graph g = complete_graph(4);
  Bisection b;
  b.side = {0, 0, 1, 1};
  b.side_weight[0] = 2;
  b.side_weight[1] = 2;
  b.cut = 4;
  b.feasible = true;
  fm2way(g, b, 2, 2, 1);
  CHECK(b.cut == 4);
  CHECK(exhaustive_bisection_optimum(g, 2, 2) == 4);
  CHECK(b.feasible);
}

TEST_CASE("fm2way is non-worsening on random bisections") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 40; ++i) {
    const VertexId n = 6 + static_cast<VertexId>(rng() % 40);
    const Graph g = random_graph(n, 4.0, rng, 10);
    Bisection b;
    b.side.resize(n);
    b.side_weight[0] = b.side_weight[1] = 0;
    for (VertexId u = 0; u < n; ++u) {
      b.side[u] = static_cast<std::uint8_t>(rng() % 2);
      b.side_weight[b.side[u]] += g.vertex_weight(u);
    }
    const VertexWeight budget = g.total_vertex_weight(); // always feasible
    std::vector<BlockId> before(b.side.begin(), b.side.end());
    b.cut = brute_force_cut(g, before);
    const EdgeWeight cut_before = b.cut;
    fm2way(g, b, budget, budget, 4);
    std::vector<BlockId> after(b.side.begin(), b.side.end());
    CHECK(b.cut == brute_force_cut(g, after));
    CHECK(b.cut <= cut_before);
  }
}

TEST_CASE("initial partition of a 4x4 grid into halves is optimal") {
  const Graph g = grid_graph(4, 4);
  // The feasible optimum over all 2^16 assignments pins the expected cut.
  const VertexWeight budget = max_block_weight(16, 2, 0.03);
  CHECK(exhaustive_bisection_optimum(g, budget, budget) == 4);

  WorkerPool pool(2);
  InitialPartitionConfig config;
  config.seed = 3;
  const Partition p = initial_partition(g, 2, 0.03, config, pool);
  CHECK(p.is_balanced());
  CHECK(p.block_weight(0) == 8);
  CHECK(p.block_weight(1) == 8);
  CHECK(edge_cut(g, p) == 4);
}

TEST_CASE("k equal to one puts everything in a single block") {
  const Graph g = grid_graph(3, 3);
  WorkerPool pool(1);
  const Partition p = initial_partition(g, 1, 0.0, {}, pool);
  CHECK(edge_cut(g, p) == 0);
  CHECK(p.block_weight(0) == 9);
}

TEST_CASE("k equal to n isolates every vertex") {
  const Graph g = cycle_graph(8);
  WorkerPool pool(2);
  InitialPartitionConfig config;
  config.seed = 5;
  const Partition p = initial_partition(g, 8, 0.0, config, pool);
  CHECK(p.is_balanced());
  CHECK(edge_cut(g, p) == static_cast<EdgeWeight>(g.m()));
  for (BlockId b = 0; b < 8; ++b) {
    CHECK(p.block_weight(b) == 1);
  }
}

TEST_CASE("odd k splits proportionally and stays balanced") {
  std::mt19937_64 rng(31);
  for (const BlockId k : {3, 5, 7}) {
    const Graph g = random_graph(60, 5.0, rng, 3);
    WorkerPool pool(2);
    InitialPartitionConfig config;
    config.seed = k;
    const Partition p = initial_partition(g, k, 0.03, config, pool);
    CHECK(p.is_balanced());
    CHECK(edge_cut(g, p) >= 0);
  }
}

TEST_CASE("a vertex heavier than the average block still fits") {
  // Star with a center whose weight exceeds W/k; the budget floor must
  // propagate into every bisection node.
  std::vector<std::tuple<VertexId, VertexId, EdgeWeight>> edges;
  for (VertexId u = 1; u < 50; ++u) {
    edges.emplace_back(0, u, 1);
  }
  std::vector<VertexWeight> weights(50, 1);
  weights[0] = 40;
  const Graph g = build_graph(50, edges, weights);
  WorkerPool pool(2);
  InitialPartitionConfig config;
  config.seed = 1;
  const Partition p = initial_partition(g, 4, 0.0, config, pool);
  CHECK(p.is_balanced());
  CHECK(p.max_block_weight() == 40);
}
