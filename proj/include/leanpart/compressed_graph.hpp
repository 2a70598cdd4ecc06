/*******************************************************************************
 * Byte-compressed adjacency representation with on-the-fly neighborhood
 * decoding: gap encoding with VarInts, runs of consecutive IDs as intervals,
 * interleaved weight deltas, and independently decodable chunks for
 * high-degree vertices.
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "leanpart/compact_array.hpp"
#include "leanpart/graph.hpp"
#include "leanpart/parallel.hpp"
#include "leanpart/reserved_buffer.hpp"
#include "leanpart/types.hpp"
#include "leanpart/varint.hpp"

namespace leanpart {

constexpr std::uint8_t kBlobFormatVersion = 1;
constexpr EdgeId kMinIntervalLength = 3;

struct CompressionConfig {
  bool interval_encoding = true;
  bool edge_weights = false;
  EdgeId chunk_threshold = 10000; // degrees above this are chunked
  EdgeId chunk_length = 1000;     // neighbors per chunk
};

namespace compression {

// --- Encoding ---------------------------------------------------------------
//
// Blob layout (format version 1):
//   blob            := version byte, neighborhoods in vertex order
//   neighborhood(u) := VarInt(firstEdgeId)
//                      degree == 0 -> nothing else
//                      degree >  chunk_threshold ->
//                          VarInt(chunkCount), VarInt(byteLen) per chunk,
//                          then the chunks, each a `body`
//                      otherwise -> body over all neighbors
//   body            := interval mode: VarInt(intervalCount), intervals, residuals
//                      gap-only mode: residuals
//   interval j      := j == 0: VarInt(zigzag(start - source))
//                      j  > 0: VarInt(start - end of previous interval)
//                      then VarInt(length - 3); weights of its members
//   residual i      := i == 0: VarInt(zigzag(target - source))
//                      i  > 0: VarInt(gap - 1); its weight
//
// Weights are interleaved after each element: the first weight written in a
// body is stored absolutely, later ones as zigzag deltas from the previously
// written weight. The chain restarts per chunk so chunks stay independent.

class WeightChain {
public:
  template <typename Out>
  void write(const EdgeWeight w, Out &out) {
    if (_first) {
      varint_encode(static_cast<std::uint64_t>(w), out);
      _first = false;
    } else {
      varint_encode(zigzag_encode(w - _prev), out);
    }
    _prev = w;
  }

  EdgeWeight read(const std::uint8_t *data, const std::size_t size, std::size_t &pos) {
    const auto [raw, used] = varint_decode(data, size, pos);
    pos += used;
    EdgeWeight w;
    if (_first) {
      w = static_cast<EdgeWeight>(raw);
      _first = false;
    } else {
      w = _prev + zigzag_decode(raw);
    }
    _prev = w;
    return w;
  }

private:
  bool _first = true;
  EdgeWeight _prev = 0;
};

template <typename Out>
void encode_body(
    const VertexId source,
    std::span<const VertexId> targets,
    std::span<const EdgeWeight> weights,
    const CompressionConfig &config,
    Out &out
) {
  const std::size_t count = targets.size();
  WeightChain chain;

  std::size_t interval_begin = count; // first index covered by intervals, per run below
  if (config.interval_encoding) {
    // Maximal runs of consecutive IDs, left to right.
    static thread_local std::vector<std::pair<std::size_t, std::size_t>> runs; // (index, length)
    runs.clear();
    std::size_t i = 0;
    while (i < count) {
      std::size_t j = i + 1;
      while (j < count && targets[j] == targets[j - 1] + 1) {
        ++j;
      }
      if (j - i >= kMinIntervalLength) {
        runs.emplace_back(i, j - i);
      }
      i = j;
    }
    varint_encode(runs.size(), out);
    VertexId prev_end = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto [idx, len] = runs[r];
      const VertexId start = targets[idx];
      if (r == 0) {
        varint_encode(zigzag_encode(static_cast<std::int64_t>(start) - source), out);
      } else {
        varint_encode(start - prev_end, out);
      }
      varint_encode(len - kMinIntervalLength, out);
      prev_end = start + static_cast<VertexId>(len);
      if (config.edge_weights) {
        for (std::size_t w = idx; w < idx + len; ++w) {
          chain.write(weights[w], out);
        }
      }
    }
    // Mark covered positions via the run list when writing residuals.
    std::size_t run_cursor = 0;
    VertexId prev_residual = 0;
    bool first_residual = true;
    for (std::size_t t = 0; t < count; ++t) {
      if (run_cursor < runs.size() && t == runs[run_cursor].first) {
        t += runs[run_cursor].second - 1;
        ++run_cursor;
        continue;
      }
      if (first_residual) {
        varint_encode(zigzag_encode(static_cast<std::int64_t>(targets[t]) - source), out);
        first_residual = false;
      } else {
        varint_encode(targets[t] - prev_residual - 1, out);
      }
      prev_residual = targets[t];
      if (config.edge_weights) {
        chain.write(weights[t], out);
      }
    }
    (void)interval_begin;
    return;
  }

  // Gap-only mode: every neighbor is a residual.
  VertexId prev = 0;
  for (std::size_t t = 0; t < count; ++t) {
    if (t == 0) {
      varint_encode(zigzag_encode(static_cast<std::int64_t>(targets[t]) - source), out);
    } else {
      varint_encode(targets[t] - prev - 1, out);
    }
    prev = targets[t];
    if (config.edge_weights) {
      chain.write(weights[t], out);
    }
  }
}

template <typename Out>
void encode_neighborhood(
    const VertexId source,
    std::span<const VertexId> targets,
    std::span<const EdgeWeight> weights,
    const EdgeId first_edge_id,
    const CompressionConfig &config,
    Out &out
) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == source) {
      throw std::invalid_argument("self-loop in neighborhood");
    }
    if (i > 0 && targets[i] <= targets[i - 1]) {
      throw std::invalid_argument("targets not strictly increasing");
    }
  }
  varint_encode(first_edge_id, out);
  const std::size_t count = targets.size();
  if (count == 0) {
    return;
  }
  if (count > config.chunk_threshold) {
    static thread_local std::vector<std::uint8_t> chunk_bytes;
    static thread_local std::vector<std::size_t> chunk_ends;
    chunk_bytes.clear();
    chunk_ends.clear();
    for (std::size_t lo = 0; lo < count; lo += config.chunk_length) {
      const std::size_t hi = std::min(count, lo + config.chunk_length);
      encode_body(
          source, targets.subspan(lo, hi - lo),
          config.edge_weights ? weights.subspan(lo, hi - lo) : weights, config, chunk_bytes
      );
      chunk_ends.push_back(chunk_bytes.size());
    }
    varint_encode(chunk_ends.size(), out);
    std::size_t prev = 0;
    for (const std::size_t end : chunk_ends) {
      varint_encode(end - prev, out);
      prev = end;
    }
    out.insert(out.end(), chunk_bytes.begin(), chunk_bytes.end());
    return;
  }
  encode_body(source, targets, weights, config, out);
}

// --- Decoding ---------------------------------------------------------------

// Reusable per-call decode scratch. A freelist (instead of one thread_local
// buffer set) keeps decoding reentrant: a visitor may itself decode another
// neighborhood.
struct BodyScratch {
  std::vector<VertexId> interval_starts;
  std::vector<VertexId> interval_lengths;
  std::vector<EdgeWeight> interval_weights;
  bool in_use = false;

  void clear() {
    interval_starts.clear();
    interval_lengths.clear();
    interval_weights.clear();
  }
};

class ScratchLease {
public:
  ScratchLease() {
    static thread_local std::vector<std::unique_ptr<BodyScratch>> freelist;
    for (auto &entry : freelist) {
      if (!entry->in_use) {
        _scratch = entry.get();
        break;
      }
    }
    if (_scratch == nullptr) {
      freelist.push_back(std::make_unique<BodyScratch>());
      _scratch = freelist.back().get();
    }
    _scratch->in_use = true;
    _scratch->clear();
  }
  ~ScratchLease() {
    _scratch->in_use = false;
  }
  ScratchLease(const ScratchLease &) = delete;
  ScratchLease &operator=(const ScratchLease &) = delete;

  BodyScratch *operator->() const {
    return _scratch;
  }

private:
  BodyScratch *_scratch = nullptr;
};

// Decodes one body over bytes [pos, end); calls sink(target, weight) in
// increasing target order and returns the number of decoded neighbors.
template <typename Sink>
std::size_t decode_body(
    const std::uint8_t *data,
    const std::size_t end,
    std::size_t pos,
    const VertexId source,
    const VertexId n,
    const CompressionConfig &config,
    Sink &&sink
) {
  WeightChain chain;
  ScratchLease scratch;
  std::vector<VertexId> &interval_starts = scratch->interval_starts;
  std::vector<VertexId> &interval_lengths = scratch->interval_lengths;
  std::vector<EdgeWeight> &interval_weights = scratch->interval_weights;

  if (config.interval_encoding) {
    const auto [interval_count, used] = varint_decode(data, end, pos);
    pos += used;
    VertexId prev_end = 0;
    for (std::uint64_t j = 0; j < interval_count; ++j) {
      const auto [head, h_used] = varint_decode(data, end, pos);
      pos += h_used;
      std::int64_t start;
      if (j == 0) {
        start = source + zigzag_decode(head);
      } else {
        start = static_cast<std::int64_t>(prev_end) + static_cast<std::int64_t>(head);
      }
      const auto [len_raw, l_used] = varint_decode(data, end, pos);
      pos += l_used;
      const std::uint64_t len = len_raw + kMinIntervalLength;
      if (start < 0 || start + static_cast<std::int64_t>(len) > n) {
        throw MalformedEncoding("interval out of vertex range", pos);
      }
      interval_starts.push_back(static_cast<VertexId>(start));
      interval_lengths.push_back(static_cast<VertexId>(len));
      prev_end = static_cast<VertexId>(start + len);
      if (config.edge_weights) {
        for (std::uint64_t w = 0; w < len; ++w) {
          interval_weights.push_back(chain.read(data, end, pos));
        }
      }
    }
  }

  // Streaming merge of the interval members with the residual list.
  std::size_t emitted = 0;
  std::size_t run = 0;
  VertexId run_offset = 0;
  std::size_t run_weight_base = 0;
  bool have_residual = false;
  bool first_residual = true;
  VertexId residual = 0;
  EdgeWeight residual_weight = 1;
  std::int64_t last_emitted = -1;

  const auto read_residual = [&] {
    if (pos >= end) {
      have_residual = false;
      return;
    }
    const auto [raw, used] = varint_decode(data, end, pos);
    pos += used;
    std::int64_t target;
    if (first_residual) {
      target = source + zigzag_decode(raw);
      first_residual = false;
    } else {
      target = static_cast<std::int64_t>(residual) + 1 + static_cast<std::int64_t>(raw);
    }
    if (target < 0 || target >= n) {
      throw MalformedEncoding("residual target out of vertex range", pos);
    }
    residual = static_cast<VertexId>(target);
    if (config.edge_weights) {
      residual_weight = chain.read(data, end, pos);
    }
    have_residual = true;
  };

  read_residual();
  while (run < interval_starts.size() || have_residual) {
    const bool take_interval =
        run < interval_starts.size() &&
        (!have_residual || interval_starts[run] + run_offset < residual);
    std::int64_t target;
    if (take_interval) {
      target = interval_starts[run] + run_offset;
      const EdgeWeight w =
          config.edge_weights ? interval_weights[run_weight_base + run_offset] : EdgeWeight{1};
      sink(static_cast<VertexId>(target), w);
      if (++run_offset == interval_lengths[run]) {
        run_weight_base += interval_lengths[run];
        run_offset = 0;
        ++run;
      }
    } else {
      target = residual;
      sink(residual, config.edge_weights ? residual_weight : EdgeWeight{1});
      read_residual();
    }
    if (target <= last_emitted) {
      throw MalformedEncoding("decoded targets not strictly increasing", pos);
    }
    last_emitted = target;
    ++emitted;
  }
  if (pos != end) {
    throw MalformedEncoding("trailing bytes after neighborhood", pos);
  }
  return emitted;
}

} // namespace compression

class CompressedGraph {
public:
  CompressedGraph() = default;

  CompressedGraph(
      const VertexId n,
      const EdgeId m,
      std::vector<VertexWeight> vertex_weights,
      CompactArray neighborhood_offsets,
      ReservedBuffer<std::uint8_t> blob,
      const CompressionConfig &config
  )
      : _n(n),
        _m(m),
        _vertex_weights(std::move(vertex_weights)),
        _offsets(std::move(neighborhood_offsets)),
        _blob(std::move(blob)),
        _config(config) {
    _total_vertex_weight = 0;
    for (const VertexWeight w : _vertex_weights) {
      _total_vertex_weight = checked_add(_total_vertex_weight, w);
    }
  }

  VertexId n() const {
    return _n;
  }
  EdgeId m() const {
    return _m;
  }

  VertexWeight vertex_weight(const VertexId u) const {
    return _vertex_weights[u];
  }
  VertexWeight total_vertex_weight() const {
    return _total_vertex_weight;
  }

  EdgeId first_edge_id(const VertexId u) const {
    if (u >= _n) {
      return 2 * _m;
    }
    const auto [value, used] = varint_decode(blob_data(), blob_size(), _offsets.get(u));
    return value;
  }

  EdgeId degree(const VertexId u) const {
    return first_edge_id(u + 1) - first_edge_id(u);
  }

  // Decodes the neighborhood of u, invoking fn(edgeId, target, weight) once
  // per neighbor in increasing target order (chunks concatenated in order).
  template <typename F>
  void neighbors(const VertexId u, F &&fn) const {
    decode(u, nullptr, [&](int, const EdgeId e, const VertexId v, const EdgeWeight w) {
      fn(e, v, w);
    });
  }

  // Chunk-parallel variant: fn(worker, edgeId, target, weight). The multiset
  // of visits matches the sequential decode; chunk order across workers is
  // arbitrary. Unchunked vertices are visited by worker 0.
  template <typename F>
  void neighbors_parallel(const VertexId u, WorkerPool &pool, F &&fn) const {
    decode(u, &pool, std::forward<F>(fn));
  }

  bool chunked(const VertexId u) const {
    return degree(u) > _config.chunk_threshold;
  }

  // Number of independently decodable chunks; 1 for unchunked vertices.
  std::uint64_t chunk_count(const VertexId u) const {
    if (!chunked(u)) {
      return 1;
    }
    const std::size_t begin = _offsets.get(u);
    const std::size_t end = _offsets.get(u + 1);
    const auto [first_edge, used] = varint_decode(blob_data(), end, begin);
    return varint_decode(blob_data(), end, begin + used).value;
  }

  std::span<const std::uint8_t> raw_neighborhood(const VertexId u) const {
    return {blob_data() + _offsets.get(u), _offsets.get(u + 1) - _offsets.get(u)};
  }

  const CompressionConfig &config() const {
    return _config;
  }

  std::size_t blob_bytes() const {
    return _blob.committed();
  }

  // Bytes of the parts the encoding replaces: blob (headers included) plus
  // the per-vertex byte offsets. Vertex weights are excluded; they are
  // stored identically for the uncompressed graph.
  std::size_t encoded_byte_size() const {
    return blob_bytes() + _offsets.byte_size();
  }

  std::size_t byte_size() const {
    return encoded_byte_size() + _vertex_weights.size() * sizeof(VertexWeight);
  }

  VertexWeight max_vertex_weight() const {
    VertexWeight max = 0;
    for (const VertexWeight w : _vertex_weights) {
      max = std::max(max, w);
    }
    return max;
  }

  EdgeId max_degree() const {
    EdgeId max = 0;
    for (VertexId u = 0; u < _n; ++u) {
      max = std::max(max, degree(u));
    }
    return max;
  }

private:
  const std::uint8_t *blob_data() const {
    return _blob.data();
  }
  std::size_t blob_size() const {
    return _blob.committed();
  }

  template <typename F>
  void decode(const VertexId u, WorkerPool *pool, F &&fn) const {
    if (u >= _n) {
      throw std::out_of_range("vertex id out of range");
    }
    const std::size_t begin = _offsets.get(u);
    const std::size_t end = _offsets.get(u + 1);
    const auto [first_edge, used] = varint_decode(blob_data(), end, begin);
    std::size_t pos = begin + used;
    const EdgeId deg = degree(u);
    if (deg == 0) {
      if (pos != end) {
        throw MalformedEncoding("nonempty body for degree-zero vertex", pos);
      }
      return;
    }
    if (deg > _config.chunk_threshold) {
      const auto [chunk_count, cc_used] = varint_decode(blob_data(), end, pos);
      pos += cc_used;
      // Chunked vertices are rare; a local directory keeps this reentrant.
      std::vector<std::size_t> bounds;
      bounds.reserve(chunk_count + 1);
      bounds.push_back(0);
      for (std::uint64_t c = 0; c < chunk_count; ++c) {
        const auto [len, l_used] = varint_decode(blob_data(), end, pos);
        pos += l_used;
        bounds.push_back(bounds.back() + len);
      }
      const std::size_t base = pos;
      if (base + bounds.back() != end) {
        throw MalformedEncoding("chunk directory does not cover the neighborhood", pos);
      }
      EdgeId total = 0;
      const auto decode_chunk = [&](const int worker, const std::uint64_t c) -> std::size_t {
        EdgeId edge = first_edge + c * _config.chunk_length;
        return compression::decode_body(
            blob_data(), base + bounds[c + 1], base + bounds[c], u, _n, _config,
            [&](const VertexId v, const EdgeWeight w) { fn(worker, edge++, v, w); }
        );
      };
      if (pool != nullptr && pool->workers() > 1) {
        std::atomic<EdgeId> atomic_total{0};
        parallel_chunks(*pool, 0, chunk_count, 1, [&](const int worker, const std::uint64_t lo, std::uint64_t) {
          atomic_total.fetch_add(decode_chunk(worker, lo), std::memory_order_relaxed);
        });
        total = atomic_total.load();
      } else {
        for (std::uint64_t c = 0; c < chunk_count; ++c) {
          total += decode_chunk(0, c);
        }
      }
      if (total != deg) {
        throw MalformedEncoding("decoded degree does not match edge-ID header", end);
      }
      return;
    }
    EdgeId edge = first_edge;
    const std::size_t emitted = compression::decode_body(
        blob_data(), end, pos, u, _n, _config,
        [&](const VertexId v, const EdgeWeight w) { fn(0, edge++, v, w); }
    );
    if (emitted != deg) {
      throw MalformedEncoding("decoded degree does not match edge-ID header", end);
    }
  }

  VertexId _n = 0;
  EdgeId _m = 0;
  std::vector<VertexWeight> _vertex_weights;
  CompactArray _offsets;
  ReservedBuffer<std::uint8_t> _blob;
  CompressionConfig _config;
  VertexWeight _total_vertex_weight = 0;
};

static_assert(GraphLike<CompressedGraph>);

// Compresses an in-memory graph; equivalent to streaming it through
// stream_compress, so the bytes are identical to the parallel I/O path.
CompressedGraph compress_graph(const Graph &g, CompressionConfig config = {}, WorkerPool *pool = nullptr);

// bytes(64-bit CSR offsets + arcs + edge weights) / bytes(blob + offsets).
double compression_ratio(const CompressedGraph &cg);
double compression_ratio(const Graph &g, const CompressedGraph &cg);

} // namespace leanpart
