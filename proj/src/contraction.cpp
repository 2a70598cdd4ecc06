#include "leanpart/contraction.hpp"

namespace leanpart {

void remap_targets(
    std::span<VertexId> targets, std::span<const VertexId> cluster_to_coarse, WorkerPool &pool
) {
  parallel_chunks(
      pool, 0, targets.size(), std::max<std::uint64_t>(1024, targets.size() / (8 * pool.workers())),
      [&](int, const std::uint64_t lo, const std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
          const VertexId coarse = cluster_to_coarse[targets[i]];
          if (coarse == kInvalidVertex) {
            throw std::logic_error("arc references an unmapped cluster");
          }
          targets[i] = coarse;
        }
      }
  );
}

} // namespace leanpart
