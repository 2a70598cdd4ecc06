#include "leanpart/lp_clustering.hpp"

namespace leanpart {

VertexId count_distinct_clusters(const Clustering &c) {
  memory::aux_vector<std::uint8_t> seen(c.n(), 0);
  VertexId distinct = 0;
  for (VertexId u = 0; u < c.n(); ++u) {
    const ClusterId id = c.cluster_of(u);
    if (seen[id] == 0) {
      seen[id] = 1;
      ++distinct;
    }
  }
  return distinct;
}

} // namespace leanpart
