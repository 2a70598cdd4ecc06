#include <doctest.h>

#include <random>

#include "leanpart/fm_refinement.hpp"
#include "leanpart/gain_table.hpp"
#include "leanpart/lp_refinement.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace leanpart;
using namespace leanpart::testing;

namespace {

Partition make_partition(const Graph &g, const BlockId k, const double eps,
                         const std::vector<BlockId> &assignment) {
  Partition p(g.n(), k, eps, g.total_vertex_weight(), g.max_vertex_weight());
  for (VertexId u = 0; u < g.n(); ++u) {
    p.set_block(u, assignment[u]);
  }
  p.rebuild_block_weights(g);
  return p;
}

} // namespace

namespace {

// Feasible optimum by enumerating all 2^n two-block assignments.
EdgeWeight exhaustive_optimum_k2(const Graph &g, const VertexWeight budget) {
  EdgeWeight best = std::numeric_limits<EdgeWeight>::max();
  for (std::uint32_t mask = 0; mask < (1u << g.n()); ++mask) {
    std::vector<BlockId> side(g.n());
    VertexWeight w0 = 0;
    for (VertexId u = 0; u < g.n(); ++u) {
      side[u] = (mask >> u) & 1;
      w0 += side[u] == 0 ? g.vertex_weight(u) : 0;
    }
    if (w0 > budget || g.total_vertex_weight() - w0 > budget) {
      continue;
    }
    best = std::min(best, brute_force_cut(g, side));
  }
  return best;
}

} // namespace

TEST_CASE("fm repairs a bad alternating split of a path") {
  const Graph g = path_graph(6);
  Partition p = make_partition(g, 2, 0.03, {0, 1, 0, 1, 0, 1});
  CHECK(edge_cut(g, p) == 5);
  CHECK(exhaustive_optimum_k2(g, p.max_block_weight()) == 1);
  WorkerPool pool(1);
  SparseGainTable table = SparseGainTable::build(g, p, pool);
  FmConfig config;
  config.deterministic = true;
  config.passes = 6;
  const FmResult result = fm_refine(g, p, table, config, pool);
  CHECK(result.final_cut == 1); // the exhaustive optimum above
  CHECK(p.is_balanced());
}

TEST_CASE("fm leaves an optimal instance alone") {
  const Graph g = path_graph(6);
  Partition p = make_partition(g, 2, 0.03, {0, 0, 0, 1, 1, 1});
  WorkerPool pool(1);
  SparseGainTable table = SparseGainTable::build(g, p, pool);
  FmConfig config;
  config.deterministic = true;
  const FmResult result = fm_refine(g, p, table, config, pool);
  CHECK(result.final_cut == result.initial_cut);
  CHECK(result.final_cut == 1);
}

TEST_CASE("fm is non-worsening and keeps tables consistent across modes") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 12; ++i) {
    const VertexId n = 40 + static_cast<VertexId>(rng() % 80);
    const Graph g = random_graph(n, 6.0, rng, 9);
    const BlockId k = 2 + static_cast<BlockId>(rng() % 4);
    // Round-robin start: balanced, as fm_refine requires.
    std::vector<BlockId> assignment(n);
    for (VertexId u = 0; u < n; ++u) {
      assignment[u] = static_cast<BlockId>(u % k);
    }
    for (const GainTableMode mode :
         {GainTableMode::kSparse, GainTableMode::kDense, GainTableMode::kNone}) {
      Partition p = make_partition(g, k, 0.2, assignment);
      const EdgeWeight before = edge_cut(g, p);
      WorkerPool pool(2);
      FmConfig config;
      config.seed = i;
      FmResult result;
      if (mode == GainTableMode::kSparse) {
        SparseGainTable table = SparseGainTable::build(g, p, pool);
        result = fm_refine(g, p, table, config, pool);
        // Table stays consistent with the final partition.
        const auto snapshot = p.assignment_snapshot();
        for (VertexId v = 0; v < n; ++v) {
          const auto expected = brute_force_affinities(g, snapshot, v);
          for (const auto &[block, value] : expected) {
            REQUIRE(table.affinity(v, block) == value);
          }
        }
        CHECK(table.debug_validate());
      } else if (mode == GainTableMode::kDense) {
        DenseGainTable table = DenseGainTable::build(g, p, pool);
        result = fm_refine(g, p, table, config, pool);
      } else {
        NoGainTable<Graph> table(g, p);
        result = fm_refine(g, p, table, config, pool);
      }
      CHECK(result.final_cut <= before);
      CHECK(result.final_cut == edge_cut(g, p));
      CHECK(p.is_balanced());
    }
  }
}

TEST_CASE("fm after lp does not lose ground on a grid") {
  const Graph g = grid_graph(8, 8);
  std::vector<BlockId> assignment(g.n());
  for (VertexId u = 0; u < g.n(); ++u) {
    assignment[u] = static_cast<BlockId>(u % 4);
  }
  Partition p = make_partition(g, 4, 0.03, assignment);
  WorkerPool pool(2);
  LpRefinementConfig lp_config;
  lp_config.seed = 9;
  const LpRefineResult lp_result = lp_refine(g, p, lp_config, pool);

  SparseGainTable table = SparseGainTable::build(g, p, pool);
  FmConfig fm_config;
  fm_config.seed = 9;
  const FmResult fm_result = fm_refine(g, p, table, fm_config, pool);
  CHECK(fm_result.final_cut <= lp_result.cut);
  CHECK(p.is_balanced());
}
