/*******************************************************************************
 * Graph and partition file I/O plus single-pass parallel compression: the
 * input is streamed neighborhood by neighborhood and encoded on the fly into
 * an overcommitted buffer, so the uncompressed graph never exists in memory.
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "leanpart/compressed_graph.hpp"
#include "leanpart/graph.hpp"
#include "leanpart/parallel.hpp"
#include "leanpart/partition.hpp"

namespace leanpart {

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string &what) : std::runtime_error(what) {}
};

struct MetisReadStats {
  std::uint64_t self_loops_dropped = 0;
  std::uint64_t reverse_arcs_added = 0;
  std::uint64_t duplicate_arcs_merged = 0;
};

// METIS text format (1-based IDs, fmt codes 0/1/10/11). Self-loops are
// dropped and missing reverse arcs are added; both are counted in `stats`.
Graph read_metis_graph(const std::string &path, MetisReadStats *stats = nullptr);
void write_metis_graph(const std::string &path, const Graph &g);

// Binary CSR fixture format: magic, flags, then little-endian 64-bit arrays.
Graph read_csr_binary(const std::string &path);
void write_csr_binary(const std::string &path, const Graph &g);

// Partition files: one block ID per line, in vertex order.
void write_partition_file(const std::string &path, const std::vector<BlockId> &assignment);
std::vector<BlockId> read_partition_file(const std::string &path);

// Yields each vertex's sorted neighborhood exactly once, in vertex order.
class NeighborhoodSource {
public:
  virtual ~NeighborhoodSource() = default;

  virtual VertexId n() const = 0;
  // Upper bound on the undirected edge count, known before streaming.
  virtual EdgeId m_bound() const = 0;
  virtual bool has_edge_weights() const = 0;

  // Fills the next vertex's neighborhood; returns false when exhausted.
  virtual bool next(std::vector<VertexId> &targets, std::vector<EdgeWeight> &weights) = 0;

  // Valid after the stream is exhausted.
  virtual std::vector<VertexWeight> take_vertex_weights() = 0;
};

class GraphSource final : public NeighborhoodSource {
public:
  explicit GraphSource(const Graph &g);

  VertexId n() const override;
  EdgeId m_bound() const override;
  bool has_edge_weights() const override;
  bool next(std::vector<VertexId> &targets, std::vector<EdgeWeight> &weights) override;
  std::vector<VertexWeight> take_vertex_weights() override;

private:
  const Graph &_graph;
  VertexId _cursor = 0;
  bool _weighted = false;
};

std::unique_ptr<NeighborhoodSource> open_metis_source(const std::string &path);
std::unique_ptr<NeighborhoodSource> open_csr_binary_source(const std::string &path);

struct PacketStats {
  std::uint64_t index;
  VertexId first_vertex;
  VertexId vertex_count;
  std::size_t byte_begin;
  std::size_t byte_end;
};

struct StreamCompressStats {
  std::vector<PacketStats> packets;
  std::size_t reserved_bytes = 0;
  std::size_t committed_bytes = 0;
};

// Upper bound for the blob reservation, computed from counts alone.
std::size_t compressed_size_upper_bound(
    VertexId n, EdgeId m, bool weighted, const CompressionConfig &config
);

// One pass over the source; byte-identical output for any worker count.
// packet_edge_budget == 0 selects max(4096, 2m / (8 * workers)).
CompressedGraph stream_compress(
    NeighborhoodSource &source,
    CompressionConfig config,
    WorkerPool &pool,
    EdgeId packet_edge_budget = 0,
    StreamCompressStats *stats = nullptr
);

} // namespace leanpart
