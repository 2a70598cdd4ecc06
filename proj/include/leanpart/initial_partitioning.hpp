/*******************************************************************************
 * Initial partitioning of the coarsest graph: recursive bisection, each
 * bisection chosen from a portfolio of seeded greedy graph growing runs
 * refined by 2-way FM.
 ******************************************************************************/
#pragma once

#include <random>
#include <vector>

#include "leanpart/graph.hpp"
#include "leanpart/parallel.hpp"
#include "leanpart/partition.hpp"

namespace leanpart {

class InfeasibleInstanceError : public std::runtime_error {
public:
  explicit InfeasibleInstanceError(const std::string &what) : std::runtime_error(what) {}
};

struct Bisection {
  std::vector<std::uint8_t> side; // 0 or 1 per vertex
  VertexWeight side_weight[2] = {0, 0};
  EdgeWeight cut = 0;
  bool feasible = false;
};

struct InitialPartitionConfig {
  int portfolio_size = 8;
  int fm_passes = 5;
  std::uint64_t seed = 1;
};

// Grows side 0 from a random seed vertex by absorbing the frontier vertex
// with the strongest (internal - external) attachment until side 0 holds
// about half the weight (or `target0` when nonzero); jumps to a random
// vertex when the frontier dries up. Budgets must admit the total weight.
Bisection greedy_graph_growing(
    const Graph &g, VertexWeight budget0, VertexWeight budget1, std::mt19937_64 &rng,
    VertexWeight target0 = 0
);

// Classic 2-way FM: per pass, repeatedly applies the best-gain move (each
// vertex at most once), then rolls back to the best prefix whose end state
// respects both budgets. The cut never increases.
void fm2way(
    const Graph &g, Bisection &b, VertexWeight budget0, VertexWeight budget1, int max_passes
);

// k-way partition via recursive bisection; k need not be a power of two.
Partition initial_partition(
    const Graph &g,
    BlockId k,
    double epsilon,
    const InitialPartitionConfig &config,
    WorkerPool &pool
);

} // namespace leanpart
