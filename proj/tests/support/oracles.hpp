/*******************************************************************************
 * Brute-force reference computations kept independent of the library paths
 * they check.
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "leanpart/graph.hpp"

namespace leanpart::testing {

// Double loop over all arcs, halved at the end.
inline EdgeWeight brute_force_cut(const Graph &g, const std::vector<BlockId> &assignment) {
  std::int64_t total = 0;
  for (VertexId u = 0; u < g.n(); ++u) {
    g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
      if (assignment[u] != assignment[v]) {
        total += w;
      }
    });
  }
  return total / 2;
}

// Sequential contraction: coarse vertices keyed by cluster ID in first-seen
// order of the given order function; adjacency as sorted maps.
struct BruteForceCoarse {
  std::vector<VertexWeight> vertex_weights;
  std::vector<std::map<VertexId, EdgeWeight>> adjacency; // coarse id -> (coarse id -> weight)
  std::vector<VertexId> fine_to_coarse;
};

inline BruteForceCoarse brute_force_contract(const Graph &g, const std::vector<ClusterId> &clusters) {
  BruteForceCoarse out;
  std::map<ClusterId, VertexId> coarse_id; // keyed by min contained fine vertex via first-seen scan
  out.fine_to_coarse.resize(g.n());
  for (VertexId u = 0; u < g.n(); ++u) {
    const ClusterId c = clusters[u];
    if (coarse_id.find(c) == coarse_id.end()) {
      const auto id = static_cast<VertexId>(coarse_id.size());
      coarse_id[c] = id;
      out.vertex_weights.push_back(0);
      out.adjacency.emplace_back();
    }
    out.fine_to_coarse[u] = coarse_id[c];
  }
  for (VertexId u = 0; u < g.n(); ++u) {
    out.vertex_weights[out.fine_to_coarse[u]] += g.vertex_weight(u);
    g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
      const VertexId cu = out.fine_to_coarse[u];
      const VertexId cv = out.fine_to_coarse[v];
      if (cu != cv) {
        out.adjacency[cu][cv] += w;
      }
    });
  }
  // Arcs leaving a cluster hit each crossing undirected edge exactly once,
  // so the accumulated weights already equal the coarse edge weights.
  return out;
}

// Affinity of vertex v to every block, recomputed from scratch.
inline std::map<BlockId, EdgeWeight>
brute_force_affinities(const Graph &g, const std::vector<BlockId> &assignment, const VertexId v) {
  std::map<BlockId, EdgeWeight> out;
  g.neighbors(v, [&](EdgeId, const VertexId t, const EdgeWeight w) {
    out[assignment[t]] += w;
  });
  return out;
}

} // namespace leanpart::testing
