/*******************************************************************************
 * Multilevel driver: coarsen by two-phase label propagation plus one-pass
 * contraction, partition the coarsest graph by recursive bisection, then
 * uncoarsen with label propagation (and optionally FM) refinement.
 ******************************************************************************/
#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "leanpart/clustering.hpp"
#include "leanpart/compressed_graph.hpp"
#include "leanpart/contraction.hpp"
#include "leanpart/fm_refinement.hpp"
#include "leanpart/gain_table.hpp"
#include "leanpart/graph.hpp"
#include "leanpart/initial_partitioning.hpp"
#include "leanpart/lp_clustering.hpp"
#include "leanpart/lp_refinement.hpp"
#include "leanpart/memory.hpp"
#include "leanpart/partition.hpp"

namespace leanpart {

struct RunConfig {
  BlockId k = 2;
  double epsilon = 0.03;
  std::uint64_t seed = 1;
  int workers = 0; // 0: hardware concurrency
  int coarsening_rounds = 5;
  int refinement_rounds = 5;
  std::uint64_t t_bump = 10000;
  enum class Refiner { kLp, kLpFm };
  Refiner refiner = Refiner::kLp;
  GainTableMode gain_table = GainTableMode::kSparse;
  bool deterministic = false; // one worker, fixed tie-breaking
  VertexId coarsening_target_factor = 32; // stop once n <= factor * k
  double min_shrink = 1.05;
  LpConfig::Strategy lp_strategy = LpConfig::Strategy::kTwoPhase;
  int portfolio_size = 8;
  int fm_passes = 3;
  std::uint32_t fm_adjacency_limit = 400;

  void validate() const {
    if (k == 0) {
      throw std::invalid_argument("k must be at least 1");
    }
    if (epsilon < 0) {
      throw std::invalid_argument("epsilon must be nonnegative");
    }
    if (coarsening_rounds < 0 || refinement_rounds < 0) {
      throw std::invalid_argument("round counts must be nonnegative");
    }
    if (t_bump < 2) {
      throw std::invalid_argument("t_bump must be at least 2");
    }
    if (portfolio_size < 1) {
      throw std::invalid_argument("portfolio size must be positive");
    }
  }
};

struct LevelStats {
  VertexId n;
  EdgeId m;
};

struct RunReport {
  EdgeWeight cut = 0;
  double imbalance = 0.0;
  double time_total_s = 0.0;
  double time_coarsen_s = 0.0;
  double time_initial_s = 0.0;
  double time_refine_s = 0.0;
  std::int64_t peak_aux_bytes = 0;
  // Instrumented auxiliary-allocation peaks per phase.
  std::int64_t peak_aux_cluster_bytes = 0;
  std::int64_t peak_aux_contract_bytes = 0;
  std::int64_t peak_aux_initial_bytes = 0;
  std::int64_t peak_aux_refine_bytes = 0;
  double compression_ratio = 1.0;
  std::vector<LevelStats> levels;
};

struct PartitionResult {
  Partition partition;
  RunReport report;
};

// Fine partition from a coarse one: each fine vertex inherits the block of
// its coarse image; the cut and the block weights are preserved exactly.
template <GraphLike GF>
Partition project_partition(const Partition &coarse, const CoarseMapping &mapping, const GF &fine) {
  Partition p(fine.n(), coarse.k(), coarse.epsilon(), coarse.total_weight(), 0);
  p.override_budget(coarse.max_block_weight());
  for (VertexId u = 0; u < fine.n(); ++u) {
    p.set_block(u, coarse.block_of(mapping.coarse_of(u)));
  }
  for (BlockId b = 0; b < coarse.k(); ++b) {
    p.add_block_weight(b, coarse.block_weight(b));
  }
  return p;
}

// Materializes any graph view as plain CSR (used when the input is already
// small enough to be the coarsest level).
template <GraphLike G>
Graph to_csr(const G &g) {
  const VertexId n = g.n();
  std::vector<EdgeId> offsets(n + 1, 0);
  for (VertexId u = 0; u < n; ++u) {
    offsets[u + 1] = offsets[u] + g.degree(u);
  }
  std::vector<VertexId> targets(offsets.back());
  std::vector<EdgeWeight> weights(offsets.back());
  std::vector<VertexWeight> vertex_weights(n);
  for (VertexId u = 0; u < n; ++u) {
    vertex_weights[u] = g.vertex_weight(u);
    EdgeId e = offsets[u];
    g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
      targets[e] = v;
      weights[e] = w;
      ++e;
    });
  }
  return Graph(std::move(offsets), std::move(targets), std::move(weights), std::move(vertex_weights));
}

namespace driver_detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(const Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Cluster weight cap guaranteeing geometric shrinkage: clusters may not
// exceed total / max(2k, n / 2), but must admit the heaviest vertex.
template <GraphLike G>
VertexWeight coarsening_cluster_cap(const G &g, const BlockId k) {
  const VertexWeight total = g.total_vertex_weight();
  const std::uint64_t target =
      std::max<std::uint64_t>(2 * static_cast<std::uint64_t>(k), g.n() / 2);
  const VertexWeight cap = std::max<VertexWeight>(1, total / static_cast<VertexWeight>(target));
  return std::max(cap, g.max_vertex_weight());
}

template <GraphLike G, typename Provider>
void run_fm(const G &g, Partition &p, Provider &provider, const RunConfig &config, WorkerPool &pool) {
  FmConfig fm;
  fm.passes = config.fm_passes;
  fm.adjacency_limit = config.fm_adjacency_limit;
  fm.seed = config.seed;
  fm.deterministic = config.deterministic;
  fm_refine(g, p, provider, fm, pool);
}

template <GraphLike G>
void refine_level(const G &g, Partition &p, const RunConfig &config, WorkerPool &pool) {
  LpRefinementConfig lp;
  lp.rounds = config.refinement_rounds;
  lp.t_bump = config.t_bump;
  lp.seed = config.seed;
  lp.deterministic = config.deterministic;
  lp_refine(g, p, lp, pool);

  if (config.refiner == RunConfig::Refiner::kLpFm && p.k() > 1) {
    switch (config.gain_table) {
    case GainTableMode::kSparse: {
      SparseGainTable table = SparseGainTable::build(g, p, pool);
      run_fm(g, p, table, config, pool);
      break;
    }
    case GainTableMode::kDense: {
      DenseGainTable table = DenseGainTable::build(g, p, pool);
      run_fm(g, p, table, config, pool);
      break;
    }
    case GainTableMode::kNone: {
      NoGainTable<G> table(g, p);
      run_fm(g, p, table, config, pool);
      break;
    }
    }
  }
}

} // namespace driver_detail

// The full multilevel pipeline. Deterministic for a fixed (config, seed)
// when config.deterministic forces a single worker.
template <GraphLike G>
PartitionResult partition_graph(const G &g, const RunConfig &config) {
  using namespace driver_detail;
  config.validate();
  auto &tracker = memory::Tracker::instance();
  tracker.reset_peaks();
  const auto t_start = Clock::now();

  WorkerPool pool(config.deterministic ? 1 : config.workers);
  RunReport report;
  report.levels.push_back({g.n(), g.m()});
  if constexpr (std::is_same_v<G, CompressedGraph>) {
    report.compression_ratio = compression_ratio(g);
  }

  // Trivial instance: everything in one block.
  if (config.k == 1 || g.n() == 0) {
    Partition p(g.n(), config.k, config.epsilon, g.total_vertex_weight(), g.max_vertex_weight());
    for (VertexId u = 0; u < g.n(); ++u) {
      p.set_block(u, 0);
    }
    p.rebuild_block_weights(g);
    report.cut = 0;
    report.imbalance = p.imbalance();
    report.time_total_s = seconds_since(t_start);
    report.peak_aux_bytes = tracker.aux_peak();
    return {std::move(p), std::move(report)};
  }

  // Coarsening: level 0 is the input view, deeper levels are plain CSR.
  struct Level {
    Graph graph;
    CoarseMapping mapping; // fine(previous level) -> this level
  };
  std::vector<Level> levels;
  const auto coarsen_limit =
      static_cast<std::uint64_t>(config.coarsening_target_factor) * config.k;

  const auto t_coarsen = Clock::now();
  {
    memory::PhaseScope phase(memory::Phase::kCluster);
    LpConfig lp;
    lp.rounds = config.coarsening_rounds;
    lp.t_bump = config.t_bump;
    lp.deterministic = config.deterministic;
    lp.strategy = config.lp_strategy;
    lp.min_shrink = config.min_shrink;

    const auto coarsen_step = [&](const auto &graph) -> bool {
      lp.seed = mix64(config.seed + levels.size());
      const Clustering clustering =
          cluster_coarsening(graph, coarsening_cluster_cap(graph, config.k), lp, pool);
      const VertexId distinct = count_distinct_clusters(clustering);
      if (static_cast<double>(graph.n()) / std::max<VertexId>(1, distinct) < config.min_shrink) {
        return false; // stalled even after the fallback
      }
      memory::PhaseScope contract_phase(memory::Phase::kContract);
      ContractionResult contracted = contract(graph, clustering, pool);
      levels.push_back({std::move(contracted.coarse), std::move(contracted.mapping)});
      report.levels.push_back({levels.back().graph.n(), levels.back().graph.m()});
      return true;
    };

    if (g.n() > coarsen_limit) {
      if (coarsen_step(g)) {
        while (levels.back().graph.n() > coarsen_limit) {
          if (!coarsen_step(levels.back().graph)) {
            break;
          }
        }
      }
    }
  }
  report.time_coarsen_s = seconds_since(t_coarsen);

  // Initial partitioning on the coarsest level.
  const auto t_initial = Clock::now();
  Partition current = [&] {
    memory::PhaseScope phase(memory::Phase::kInitial);
    InitialPartitionConfig ip;
    ip.portfolio_size = config.portfolio_size;
    ip.seed = config.seed;
    if (!levels.empty()) {
      return initial_partition(levels.back().graph, config.k, config.epsilon, ip, pool);
    }
    if constexpr (std::is_same_v<G, Graph>) {
      return initial_partition(g, config.k, config.epsilon, ip, pool);
    } else {
      const Graph csr = to_csr(g);
      return initial_partition(csr, config.k, config.epsilon, ip, pool);
    }
  }();
  report.time_initial_s = seconds_since(t_initial);

  // Uncoarsening: refine, project, repeat; finally refine the input level.
  const auto t_refine = Clock::now();
  {
    memory::PhaseScope phase(memory::Phase::kRefine);
    for (std::size_t level = levels.size(); level > 0; --level) {
      refine_level(levels[level - 1].graph, current, config, pool);
      if (level >= 2) {
        current = project_partition(current, levels[level - 1].mapping, levels[level - 2].graph);
      } else {
        current = project_partition(current, levels[0].mapping, g);
      }
    }
    refine_level(g, current, config, pool);
  }
  report.time_refine_s = seconds_since(t_refine);

  report.cut = edge_cut(g, current, &pool);
  report.imbalance = current.imbalance();
  report.time_total_s = seconds_since(t_start);
  report.peak_aux_bytes = tracker.aux_peak();
  report.peak_aux_cluster_bytes = tracker.aux_phase_peak(memory::Phase::kCluster);
  report.peak_aux_contract_bytes = tracker.aux_phase_peak(memory::Phase::kContract);
  report.peak_aux_initial_bytes = tracker.aux_phase_peak(memory::Phase::kInitial);
  report.peak_aux_refine_bytes = tracker.aux_phase_peak(memory::Phase::kRefine);
  return {std::move(current), std::move(report)};
}

} // namespace leanpart
