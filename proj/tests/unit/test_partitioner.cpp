#include <doctest.h>

#include <random>

#include "leanpart/graph_io.hpp"
#include "leanpart/partitioner.hpp"
#include "support/generators.hpp"

using namespace leanpart;
using namespace leanpart::testing;

TEST_CASE("grid partition is balanced with a sane cut") {
  const Graph g = grid_graph(32, 32);
  RunConfig config;
  config.k = 4;
  config.epsilon = 0.03;
  config.seed = 1;
  config.deterministic = true;
  config.refiner = RunConfig::Refiner::kLpFm;
  const PartitionResult result = partition_graph(g, config);
  CHECK(result.partition.is_balanced());
  CHECK(result.report.cut == edge_cut(g, result.partition));
  // 4 quadrants of a 32x32 grid cut 64 edges; allow 1.5x slack.
  CHECK(result.report.cut <= 96);
  CHECK(result.report.levels.size() >= 2);

  // The parallel path must stay balanced and self-consistent as well.
  config.deterministic = false;
  const PartitionResult parallel = partition_graph(g, config);
  CHECK(parallel.partition.is_balanced());
  CHECK(parallel.report.cut == edge_cut(g, parallel.partition));
}

TEST_CASE("k equal to one is trivial") {
  const Graph g = grid_graph(8, 8);
  RunConfig config;
  config.k = 1;
  const PartitionResult result = partition_graph(g, config);
  CHECK(result.report.cut == 0);
  CHECK(result.partition.block_weight(0) == 64);
}

TEST_CASE("complete graph splits into forced halves") {
  const Graph g = complete_graph(8);
  RunConfig config;
  config.k = 2;
  config.epsilon = 0.0;
  config.seed = 3;
  const PartitionResult result = partition_graph(g, config);
  CHECK(result.partition.is_balanced());
  CHECK(result.report.cut == 16);
  CHECK(result.partition.block_weight(0) == 4);
  CHECK(result.partition.block_weight(1) == 4);
}

TEST_CASE("projection preserves the cut and block weights") {
  std::mt19937_64 rng(12);
  const Graph g = random_graph(120, 6.0, rng, 5);
  Clustering clustering = Clustering::singletons(g, g.total_vertex_weight());
  // Random clustering with small clusters.
  for (VertexId u = 0; u < g.n(); ++u) {
    const ClusterId target = static_cast<ClusterId>(rng() % 40);
    clustering.release(clustering.cluster_of(u), g.vertex_weight(u));
    REQUIRE(clustering.try_reserve(target, g.vertex_weight(u)));
    clustering.set_cluster(u, target);
  }
  WorkerPool pool(2);
  const ContractionResult contracted = contract(g, clustering, pool);

  Partition coarse(contracted.coarse.n(), 3, 0.1, contracted.coarse.total_vertex_weight(),
                   contracted.coarse.max_vertex_weight());
  for (VertexId cu = 0; cu < contracted.coarse.n(); ++cu) {
    coarse.set_block(cu, static_cast<BlockId>(rng() % 3));
  }
  coarse.rebuild_block_weights(contracted.coarse);

  const Partition fine = project_partition(coarse, contracted.mapping, g);
  CHECK(edge_cut(g, fine) == edge_cut(contracted.coarse, coarse));
  for (BlockId b = 0; b < 3; ++b) {
    CHECK(fine.block_weight(b) == coarse.block_weight(b));
  }

  // Identity-style check: projecting through a singleton contraction keeps
  // the assignment.
  Clustering singleton = Clustering::singletons(g, g.total_vertex_weight());
  const ContractionResult identity = contract(g, singleton, pool);
  REQUIRE(identity.coarse.n() == g.n());
  Partition q(identity.coarse.n(), 2, 0.5, g.total_vertex_weight(), g.max_vertex_weight());
  for (VertexId u = 0; u < identity.coarse.n(); ++u) {
    q.set_block(u, u % 2);
  }
  q.rebuild_block_weights(identity.coarse);
  const Partition projected = project_partition(q, identity.mapping, g);
  for (VertexId u = 0; u < g.n(); ++u) {
    CHECK(projected.block_of(u) == q.block_of(identity.mapping.coarse_of(u)));
  }
}

TEST_CASE("deterministic runs with one worker reproduce exactly") {
  std::mt19937_64 rng(5);
  const Graph g = random_graph(400, 7.0, rng, 3);
  RunConfig config;
  config.k = 4;
  config.seed = 11;
  config.deterministic = true;
  config.refiner = RunConfig::Refiner::kLpFm;
  const PartitionResult a = partition_graph(g, config);
  const PartitionResult b = partition_graph(g, config);
  CHECK(a.report.cut == b.report.cut);
  CHECK(a.partition.assignment_snapshot() == b.partition.assignment_snapshot());
}

TEST_CASE("compressed and uncompressed inputs partition identically") {
  std::mt19937_64 rng(21);
  const Graph g = random_graph(500, 6.0, rng, 4);
  const CompressedGraph cg = compress_graph(g);
  RunConfig config;
  config.k = 3;
  config.seed = 7;
  config.deterministic = true;
  const PartitionResult a = partition_graph(g, config);
  const PartitionResult b = partition_graph(cg, config);
  CHECK(a.report.cut == b.report.cut);
  CHECK(a.partition.assignment_snapshot() == b.partition.assignment_snapshot());
  CHECK(b.report.compression_ratio > 1.0);
}

TEST_CASE("small compressed graphs skip coarsening but still partition") {
  const Graph g = grid_graph(6, 6);
  const CompressedGraph cg = compress_graph(g);
  RunConfig config;
  config.k = 2;
  config.seed = 2;
  const PartitionResult result = partition_graph(cg, config);
  CHECK(result.partition.is_balanced());
  CHECK(result.report.cut == edge_cut(cg, result.partition));
}

TEST_CASE("run reports track hierarchy shrinkage") {
  std::mt19937_64 rng(33);
  const Graph g = random_graph(2000, 8.0, rng);
  RunConfig config;
  config.k = 2;
  config.seed = 9;
  const PartitionResult result = partition_graph(g, config);
  const auto &levels = result.report.levels;
  REQUIRE(levels.size() >= 2);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    CHECK(levels[i].n < levels[i - 1].n);
  }
  CHECK(result.report.peak_aux_bytes > 0);
  CHECK(result.report.peak_aux_cluster_bytes > 0);
  CHECK(result.report.peak_aux_cluster_bytes <= result.report.peak_aux_bytes);
  CHECK(result.report.peak_aux_initial_bytes <= result.report.peak_aux_bytes);
  CHECK(result.report.time_total_s >= 0.0);
}

TEST_CASE("invalid configurations are rejected") {
  RunConfig config;
  config.k = 0;
  const Graph g = grid_graph(2, 2);
  CHECK_THROWS_AS(partition_graph(g, config), std::invalid_argument);
}
