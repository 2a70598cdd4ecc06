#include "leanpart/compressed_graph.hpp"

#include "leanpart/graph_io.hpp"

namespace leanpart {

CompressedGraph compress_graph(const Graph &g, CompressionConfig config, WorkerPool *pool) {
  GraphSource source(g);
  if (pool != nullptr) {
    return stream_compress(source, config, *pool);
  }
  WorkerPool inline_pool(1);
  return stream_compress(source, config, inline_pool);
}

double compression_ratio(const CompressedGraph &cg) {
  const double csr_bytes = (static_cast<double>(cg.n()) + 1) * 8.0 +
                           static_cast<double>(2 * cg.m()) * 8.0 +
                           static_cast<double>(2 * cg.m()) * 8.0;
  const double compressed_bytes = static_cast<double>(cg.encoded_byte_size());
  return compressed_bytes > 0 ? csr_bytes / compressed_bytes : 1.0;
}

double compression_ratio(const Graph &g, const CompressedGraph &cg) {
  (void)g;
  return compression_ratio(cg);
}

} // namespace leanpart
