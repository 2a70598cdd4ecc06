#include "leanpart/graph.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace leanpart {

std::vector<std::string> validate_graph(const Graph &g) {
  std::vector<std::string> violations;
  const auto offsets = g.offsets();
  const auto targets = g.targets();
  const auto weights = g.edge_weights();

  if (offsets.empty()) {
    if (!targets.empty()) {
      violations.emplace_back("empty offset array with nonempty arc array");
    }
    return violations;
  }

  if (offsets.front() != 0) {
    violations.emplace_back("offsets[0] != 0");
  }
  for (std::size_t i = 1; i < offsets.size(); ++i) {
    if (offsets[i] < offsets[i - 1]) {
      std::ostringstream msg;
      msg << "non-monotone offset at index " << i;
      violations.push_back(msg.str());
    }
  }
  if (offsets.back() != targets.size()) {
    violations.emplace_back("offsets[n] does not equal the arc count");
    return violations; // index arithmetic below would be unsafe
  }
  if (weights.size() != targets.size()) {
    violations.emplace_back("edge weight array length does not match arc count");
    return violations;
  }

  const VertexId n = g.n();
  for (VertexId u = 0; u < n; ++u) {
    for (EdgeId e = offsets[u]; e < offsets[u + 1]; ++e) {
      if (targets[e] >= n) {
        std::ostringstream msg;
        msg << "target out of range at arc (" << u << "," << targets[e] << ")";
        violations.push_back(msg.str());
      } else if (targets[e] == u) {
        std::ostringstream msg;
        msg << "self-loop at vertex " << u;
        violations.push_back(msg.str());
      }
      if (weights[e] <= 0) {
        std::ostringstream msg;
        msg << "non-positive weight at arc (" << u << "," << targets[e] << ")";
        violations.push_back(msg.str());
      }
    }
  }
  for (VertexId u = 0; u < n; ++u) {
    if (g.vertex_weight(u) <= 0) {
      std::ostringstream msg;
      msg << "non-positive vertex weight at vertex " << u;
      violations.push_back(msg.str());
    }
  }
  if (!violations.empty()) {
    return violations;
  }

  // Symmetry: the multiset of (u,v,w) arcs must equal its transpose.
  using Arc = std::tuple<VertexId, VertexId, EdgeWeight>;
  std::vector<Arc> forward;
  std::vector<Arc> reverse;
  forward.reserve(targets.size());
  reverse.reserve(targets.size());
  for (VertexId u = 0; u < n; ++u) {
    for (EdgeId e = offsets[u]; e < offsets[u + 1]; ++e) {
      forward.emplace_back(u, targets[e], weights[e]);
      reverse.emplace_back(targets[e], u, weights[e]);
    }
  }
  std::sort(forward.begin(), forward.end());
  std::sort(reverse.begin(), reverse.end());
  constexpr std::size_t kMaxReported = 16;
  for (std::size_t i = 0; i < forward.size() && violations.size() < kMaxReported; ++i) {
    if (forward[i] != reverse[i]) {
      const auto [u, v, w] = forward[i];
      std::ostringstream msg;
      msg << "asymmetry at arc (" << u << "," << v << ")";
      violations.push_back(msg.str());
    }
  }
  return violations;
}

} // namespace leanpart
