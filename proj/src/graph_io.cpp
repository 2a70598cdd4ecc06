#include "leanpart/graph_io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace leanpart {

namespace {

struct ParsedLine {
  const char *pos;
  const char *end;
};

bool next_token(ParsedLine &line, std::uint64_t &value) {
  while (line.pos < line.end && (*line.pos == ' ' || *line.pos == '\t' || *line.pos == '\r')) {
    ++line.pos;
  }
  if (line.pos >= line.end) {
    return false;
  }
  const auto [ptr, ec] = std::from_chars(line.pos, line.end, value);
  if (ec != std::errc()) {
    throw IoError("invalid integer token");
  }
  line.pos = ptr;
  return true;
}

struct MetisHeader {
  VertexId n = 0;
  EdgeId m = 0;
  bool vertex_weights = false;
  bool edge_weights = false;
};

MetisHeader parse_metis_header(std::istream &in, const std::string &path, std::size_t &line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') {
      continue;
    }
    std::istringstream hdr(line);
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    std::string fmt;
    if (!(hdr >> n >> m)) {
      throw IoError(path + ":" + std::to_string(line_no) + ": malformed header");
    }
    MetisHeader header;
    header.n = static_cast<VertexId>(n);
    header.m = m;
    if (hdr >> fmt) {
      if (fmt.size() > 3 || fmt.find_first_not_of("01") != std::string::npos) {
        throw IoError(path + ":" + std::to_string(line_no) + ": unsupported fmt code " + fmt);
      }
      const int code = std::stoi(fmt);
      header.edge_weights = code % 10 == 1;
      header.vertex_weights = (code / 10) % 10 == 1;
      std::uint64_t ncon = 0;
      if (hdr >> ncon && ncon > 1) {
        throw IoError(path + ": multi-constraint vertex weights are not supported");
      }
    }
    return header;
  }
  throw IoError(path + ": missing header line");
}

// Parses one vertex line into (targets, weights); returns the vertex weight.
VertexWeight parse_metis_line(
    const std::string &line,
    const MetisHeader &header,
    const VertexId u,
    const std::string &path,
    const std::size_t line_no,
    std::vector<VertexId> &targets,
    std::vector<EdgeWeight> &weights,
    std::uint64_t &self_loops
) {
  targets.clear();
  weights.clear();
  ParsedLine cursor{line.data(), line.data() + line.size()};
  VertexWeight vertex_weight = 1;
  std::uint64_t token;
  if (header.vertex_weights) {
    if (!next_token(cursor, token)) {
      throw IoError(path + ":" + std::to_string(line_no) + ": missing vertex weight");
    }
    vertex_weight = static_cast<VertexWeight>(token);
    if (vertex_weight <= 0) {
      throw IoError(path + ":" + std::to_string(line_no) + ": non-positive vertex weight");
    }
  }
  while (true) {
    std::uint64_t target;
    if (!next_token(cursor, target)) {
      break;
    }
    if (target < 1 || target > header.n) {
      throw IoError(path + ":" + std::to_string(line_no) + ": neighbor ID out of range");
    }
    EdgeWeight w = 1;
    if (header.edge_weights) {
      std::uint64_t weight_token;
      if (!next_token(cursor, weight_token)) {
        throw IoError(path + ":" + std::to_string(line_no) + ": missing edge weight");
      }
      if (weight_token == 0) {
        throw IoError(path + ":" + std::to_string(line_no) + ": zero edge weight");
      }
      w = static_cast<EdgeWeight>(weight_token);
    }
    const auto v = static_cast<VertexId>(target - 1);
    if (v == u) {
      ++self_loops;
      continue;
    }
    targets.push_back(v);
    weights.push_back(w);
  }
  return vertex_weight;
}

// Sorts by target and merges duplicates by summing their weights.
std::uint64_t sort_and_merge(std::vector<VertexId> &targets, std::vector<EdgeWeight> &weights) {
  if (targets.empty()) {
    return 0;
  }
  std::vector<std::size_t> order(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](const std::size_t a, const std::size_t b) {
    return targets[a] < targets[b];
  });
  std::vector<VertexId> sorted_targets;
  std::vector<EdgeWeight> sorted_weights;
  sorted_targets.reserve(targets.size());
  sorted_weights.reserve(weights.size());
  std::uint64_t merged = 0;
  for (const std::size_t i : order) {
    if (!sorted_targets.empty() && sorted_targets.back() == targets[i]) {
      sorted_weights.back() = checked_add(sorted_weights.back(), weights[i]);
      ++merged;
    } else {
      sorted_targets.push_back(targets[i]);
      sorted_weights.push_back(weights[i]);
    }
  }
  targets.swap(sorted_targets);
  weights.swap(sorted_weights);
  return merged;
}

} // namespace

Graph read_metis_graph(const std::string &path, MetisReadStats *stats) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::size_t line_no = 0;
  const MetisHeader header = parse_metis_header(in, path, line_no);

  MetisReadStats local_stats;
  std::vector<std::vector<std::pair<VertexId, EdgeWeight>>> adj(header.n);
  std::vector<VertexWeight> vertex_weights(header.n, 1);

  std::string line;
  std::vector<VertexId> targets;
  std::vector<EdgeWeight> weights;
  VertexId u = 0;
  while (u < header.n) {
    if (!std::getline(in, line)) {
      throw IoError(path + ": unexpected end of file after " + std::to_string(u) + " vertex lines");
    }
    ++line_no;
    if (!line.empty() && line[0] == '%') {
      continue;
    }
    vertex_weights[u] =
        parse_metis_line(line, header, u, path, line_no, targets, weights, local_stats.self_loops_dropped);
    local_stats.duplicate_arcs_merged += sort_and_merge(targets, weights);
    adj[u].reserve(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
      adj[u].emplace_back(targets[i], weights[i]);
    }
    ++u;
  }

  // Symmetrize: for each directed arc, make sure the reverse exists; when
  // both directions carry different weights the larger one wins.
  bool weight_mismatch = false;
  for (VertexId src = 0; src < header.n; ++src) {
    for (const auto &[dst, w] : adj[src]) {
      const auto &reverse = adj[dst];
      const auto it = std::lower_bound(
          reverse.begin(), reverse.end(), src,
          [](const auto &entry, const VertexId key) { return entry.first < key; }
      );
      if (it == reverse.end() || it->first != src) {
        ++local_stats.reverse_arcs_added;
      } else if (it->second != w) {
        weight_mismatch = true;
      }
    }
  }
  if (local_stats.reverse_arcs_added > 0 || weight_mismatch) {
    std::vector<std::vector<std::pair<VertexId, EdgeWeight>>> sym(header.n);
    for (VertexId src = 0; src < header.n; ++src) {
      for (const auto &[dst, w] : adj[src]) {
        sym[src].emplace_back(dst, w);
        sym[dst].emplace_back(src, w);
      }
    }
    for (VertexId v = 0; v < header.n; ++v) {
      auto &list = sym[v];
      std::sort(list.begin(), list.end());
      std::vector<std::pair<VertexId, EdgeWeight>> merged;
      for (const auto &entry : list) {
        if (!merged.empty() && merged.back().first == entry.first) {
          merged.back().second = std::max(merged.back().second, entry.second);
        } else {
          merged.push_back(entry);
        }
      }
      list.swap(merged);
    }
    adj.swap(sym);
  }

  std::vector<EdgeId> offsets(header.n + 1, 0);
  for (VertexId v = 0; v < header.n; ++v) {
    offsets[v + 1] = offsets[v] + adj[v].size();
  }
  std::vector<VertexId> flat_targets(offsets.back());
  std::vector<EdgeWeight> flat_weights(offsets.back());
  for (VertexId v = 0; v < header.n; ++v) {
    EdgeId e = offsets[v];
    for (const auto &[dst, w] : adj[v]) {
      flat_targets[e] = dst;
      flat_weights[e] = w;
      ++e;
    }
  }
  if (stats != nullptr) {
    *stats = local_stats;
  }
  return Graph(std::move(offsets), std::move(flat_targets), std::move(flat_weights), std::move(vertex_weights));
}

void write_metis_graph(const std::string &path, const Graph &g) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  bool has_vertex_weights = false;
  for (VertexId u = 0; u < g.n(); ++u) {
    has_vertex_weights |= g.vertex_weight(u) != 1;
  }
  bool has_edge_weights = false;
  for (const EdgeWeight w : g.edge_weights()) {
    has_edge_weights |= w != 1;
  }
  out << g.n() << ' ' << g.m();
  if (has_vertex_weights || has_edge_weights) {
    out << ' ' << (has_vertex_weights ? "1" : "0") << (has_edge_weights ? "1" : "1");
  }
  out << '\n';
  for (VertexId u = 0; u < g.n(); ++u) {
    bool first = true;
    if (has_vertex_weights) {
      out << g.vertex_weight(u);
      first = false;
    }
    g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
      if (!first) {
        out << ' ';
      }
      out << (v + 1);
      if (has_edge_weights || has_vertex_weights) {
        out << ' ' << w;
      }
      first = false;
    });
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed for " + path);
  }
}

namespace {

constexpr char kCsrMagic[8] = {'L', 'P', 'C', 'S', 'R', 'B', '0', '1'};

template <typename T>
void write_raw(std::ofstream &out, const T &value) {
  out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream &in, const std::string &path) {
  T value;
  in.read(reinterpret_cast<char *>(&value), sizeof(T));
  if (!in) {
    throw IoError(path + ": truncated binary graph");
  }
  return value;
}

} // namespace

void write_csr_binary(const std::string &path, const Graph &g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  out.write(kCsrMagic, sizeof(kCsrMagic));
  write_raw<std::uint64_t>(out, g.n());
  write_raw<std::uint64_t>(out, g.m());
  std::uint32_t has_vw = 0;
  for (VertexId u = 0; u < g.n(); ++u) {
    has_vw |= g.vertex_weight(u) != 1;
  }
  std::uint32_t has_ew = 0;
  for (const EdgeWeight w : g.edge_weights()) {
    has_ew |= w != 1;
  }
  write_raw(out, has_vw);
  write_raw(out, has_ew);
  for (const EdgeId off : g.offsets()) {
    write_raw<std::uint64_t>(out, off);
  }
  for (const VertexId t : g.targets()) {
    write_raw<std::uint64_t>(out, t);
  }
  if (has_ew != 0) {
    for (const EdgeWeight w : g.edge_weights()) {
      write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(w));
    }
  }
  if (has_vw != 0) {
    for (VertexId u = 0; u < g.n(); ++u) {
      write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(g.vertex_weight(u)));
    }
  }
  if (!out) {
    throw IoError("write failed for " + path);
  }
}

Graph read_csr_binary(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCsrMagic, sizeof(magic)) != 0) {
    throw IoError(path + ": not a binary CSR graph");
  }
  const auto n = static_cast<VertexId>(read_raw<std::uint64_t>(in, path));
  const auto m = read_raw<std::uint64_t>(in, path);
  const auto has_vw = read_raw<std::uint32_t>(in, path);
  const auto has_ew = read_raw<std::uint32_t>(in, path);
  std::vector<EdgeId> offsets(n + 1);
  for (auto &off : offsets) {
    off = read_raw<std::uint64_t>(in, path);
  }
  if (offsets.back() != 2 * m) {
    throw IoError(path + ": offset array does not match edge count");
  }
  std::vector<VertexId> targets(2 * m);
  for (auto &t : targets) {
    const auto raw = read_raw<std::uint64_t>(in, path);
    if (raw >= n) {
      throw IoError(path + ": arc target out of range");
    }
    t = static_cast<VertexId>(raw);
  }
  std::vector<EdgeWeight> edge_weights(2 * m, 1);
  if (has_ew != 0) {
    for (auto &w : edge_weights) {
      w = static_cast<EdgeWeight>(read_raw<std::uint64_t>(in, path));
    }
  }
  std::vector<VertexWeight> vertex_weights(n, 1);
  if (has_vw != 0) {
    for (auto &w : vertex_weights) {
      w = static_cast<VertexWeight>(read_raw<std::uint64_t>(in, path));
    }
  }
  return Graph(std::move(offsets), std::move(targets), std::move(edge_weights), std::move(vertex_weights));
}

void write_partition_file(const std::string &path, const std::vector<BlockId> &assignment) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  for (const BlockId b : assignment) {
    out << b << '\n';
  }
  if (!out) {
    throw IoError("write failed for " + path);
  }
}

std::vector<BlockId> read_partition_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::vector<BlockId> assignment;
  std::uint64_t value;
  while (in >> value) {
    assignment.push_back(static_cast<BlockId>(value));
  }
  return assignment;
}

// --- Neighborhood sources ----------------------------------------------------

GraphSource::GraphSource(const Graph &g) : _graph(g) {
  for (const EdgeWeight w : g.edge_weights()) {
    if (w != 1) {
      _weighted = true;
      break;
    }
  }
}

VertexId GraphSource::n() const {
  return _graph.n();
}
EdgeId GraphSource::m_bound() const {
  return _graph.m();
}
bool GraphSource::has_edge_weights() const {
  return _weighted;
}

bool GraphSource::next(std::vector<VertexId> &targets, std::vector<EdgeWeight> &weights) {
  if (_cursor >= _graph.n()) {
    return false;
  }
  targets.clear();
  weights.clear();
  _graph.neighbors(_cursor, [&](EdgeId, const VertexId v, const EdgeWeight w) {
    targets.push_back(v);
    weights.push_back(w);
  });
  ++_cursor;
  return true;
}

std::vector<VertexWeight> GraphSource::take_vertex_weights() {
  return {_graph.vertex_weights().begin(), _graph.vertex_weights().end()};
}

namespace {

class MetisFileSource final : public NeighborhoodSource {
public:
  explicit MetisFileSource(const std::string &path) : _path(path), _in(path) {
    if (!_in) {
      throw IoError("cannot open " + path);
    }
    _header = parse_metis_header(_in, _path, _line_no);
    _vertex_weights.assign(_header.n, 1);
  }

  VertexId n() const override {
    return _header.n;
  }
  EdgeId m_bound() const override {
    return _header.m;
  }
  bool has_edge_weights() const override {
    return _header.edge_weights;
  }

  bool next(std::vector<VertexId> &targets, std::vector<EdgeWeight> &weights) override {
    if (_cursor >= _header.n) {
      return false;
    }
    std::string line;
    while (true) {
      if (!std::getline(_in, line)) {
        throw IoError(_path + ": unexpected end of file");
      }
      ++_line_no;
      if (line.empty() || line[0] != '%') {
        break;
      }
    }
    std::uint64_t dropped = 0;
    _vertex_weights[_cursor] =
        parse_metis_line(line, _header, _cursor, _path, _line_no, targets, weights, dropped);
    sort_and_merge(targets, weights);
    ++_cursor;
    return true;
  }

  std::vector<VertexWeight> take_vertex_weights() override {
    return std::move(_vertex_weights);
  }

private:
  std::string _path;
  std::ifstream _in;
  MetisHeader _header;
  std::size_t _line_no = 0;
  VertexId _cursor = 0;
  std::vector<VertexWeight> _vertex_weights;
};

class CsrBinarySource final : public NeighborhoodSource {
public:
  explicit CsrBinarySource(const std::string &path) : _path(path), _in(path, std::ios::binary) {
    if (!_in) {
      throw IoError("cannot open " + path);
    }
    char magic[8];
    _in.read(magic, sizeof(magic));
    if (!_in || std::memcmp(magic, kCsrMagic, sizeof(magic)) != 0) {
      throw IoError(path + ": not a binary CSR graph");
    }
    _n = static_cast<VertexId>(read_raw<std::uint64_t>(_in, _path));
    _m = read_raw<std::uint64_t>(_in, _path);
    _has_vw = read_raw<std::uint32_t>(_in, _path) != 0;
    _has_ew = read_raw<std::uint32_t>(_in, _path) != 0;
    _offsets.resize(_n + 1);
    for (auto &off : _offsets) {
      off = read_raw<std::uint64_t>(_in, _path);
    }
    _vertex_weights.assign(_n, 1);
    // Arrays are laid out offsets/targets/edge weights/vertex weights; the
    // target and weight streams are read interleaved per vertex via seeks.
    _targets_begin = _in.tellg();
    _weights_begin =
        _targets_begin + static_cast<std::streamoff>(2 * _m * sizeof(std::uint64_t));
  }

  VertexId n() const override {
    return _n;
  }
  EdgeId m_bound() const override {
    return _m;
  }
  bool has_edge_weights() const override {
    return _has_ew;
  }

  bool next(std::vector<VertexId> &targets, std::vector<EdgeWeight> &weights) override {
    if (_cursor >= _n) {
      return false;
    }
    const EdgeId begin = _offsets[_cursor];
    const EdgeId end = _offsets[_cursor + 1];
    targets.clear();
    weights.clear();
    _in.seekg(_targets_begin + static_cast<std::streamoff>(begin * sizeof(std::uint64_t)));
    for (EdgeId e = begin; e < end; ++e) {
      targets.push_back(static_cast<VertexId>(read_raw<std::uint64_t>(_in, _path)));
    }
    if (_has_ew) {
      _in.seekg(_weights_begin + static_cast<std::streamoff>(begin * sizeof(std::uint64_t)));
      for (EdgeId e = begin; e < end; ++e) {
        weights.push_back(static_cast<EdgeWeight>(read_raw<std::uint64_t>(_in, _path)));
      }
    } else {
      weights.assign(targets.size(), 1);
    }
    ++_cursor;
    return true;
  }

  std::vector<VertexWeight> take_vertex_weights() override {
    if (_has_vw) {
      _in.seekg(
          _weights_begin +
          static_cast<std::streamoff>((_has_ew ? 2 * _m : 0) * sizeof(std::uint64_t))
      );
      for (auto &w : _vertex_weights) {
        w = static_cast<VertexWeight>(read_raw<std::uint64_t>(_in, _path));
      }
    }
    return std::move(_vertex_weights);
  }

private:
  std::string _path;
  std::ifstream _in;
  VertexId _n = 0;
  EdgeId _m = 0;
  bool _has_vw = false;
  bool _has_ew = false;
  std::vector<EdgeId> _offsets;
  std::vector<VertexWeight> _vertex_weights;
  std::streamoff _targets_begin = 0;
  std::streamoff _weights_begin = 0;
  VertexId _cursor = 0;
};

} // namespace

std::unique_ptr<NeighborhoodSource> open_metis_source(const std::string &path) {
  return std::make_unique<MetisFileSource>(path);
}

std::unique_ptr<NeighborhoodSource> open_csr_binary_source(const std::string &path) {
  return std::make_unique<CsrBinarySource>(path);
}

// --- Single-pass parallel compression ----------------------------------------

std::size_t compressed_size_upper_bound(
    const VertexId n, const EdgeId m, const bool weighted, const CompressionConfig &config
) {
  const EdgeId arcs = 2 * m;
  const std::size_t per_vertex =
      varint_length(arcs) + (config.interval_encoding ? varint_length(n) : 0);
  const std::size_t per_arc =
      varint_length(2 * static_cast<std::uint64_t>(n)) + (weighted ? kMaxVarIntBytes : 0);
  // Chunk directories exist only for degrees above the threshold.
  const std::size_t chunked_vertices = arcs / std::max<EdgeId>(1, config.chunk_threshold) + 1;
  const std::size_t chunks = arcs / std::max<EdgeId>(1, config.chunk_length) + chunked_vertices;
  const std::size_t directory = chunked_vertices * kMaxVarIntBytes + chunks * kMaxVarIntBytes;
  return 1 + static_cast<std::size_t>(n) * per_vertex + static_cast<std::size_t>(arcs) * per_arc +
         directory;
}

CompressedGraph stream_compress(
    NeighborhoodSource &source,
    CompressionConfig config,
    WorkerPool &pool,
    EdgeId packet_edge_budget,
    StreamCompressStats *stats
) {
  const VertexId n = source.n();
  const EdgeId m_bound = source.m_bound();
  config.edge_weights = source.has_edge_weights();
  if (packet_edge_budget == 0) {
    packet_edge_budget = std::max<EdgeId>(4096, 2 * m_bound / (8 * pool.workers()));
  }

  const std::size_t bound = compressed_size_upper_bound(n, m_bound, config.edge_weights, config);
  ReservedBuffer<std::uint8_t> blob(bound, memory::Category::kGraph);
  CompactArray offsets(static_cast<std::size_t>(n) + 1, bound);
  if (bound > 0) {
    blob.data()[0] = kBlobFormatVersion;
  }

  struct SharedCursor {
    std::mutex mutex;
    VertexId next_vertex = 0;
    EdgeId arcs_consumed = 0;
    std::uint64_t next_packet = 0;
    bool exhausted = false;
  } shared;

  std::atomic<std::uint64_t> place_turn{0}; // next packet allowed to reserve blob space
  std::size_t blob_end = 1;                 // past the version byte; guarded by place_turn
  std::atomic<EdgeId> total_arcs{0};
  std::atomic<bool> failed{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  StreamCompressStats local_stats;
  std::mutex stats_mutex;

  pool.run([&](int) {
    std::vector<VertexId> targets;
    std::vector<EdgeWeight> weights;
    // Per-packet staging: raw neighborhoods, then their encodings.
    std::vector<VertexId> packet_targets;
    std::vector<EdgeWeight> packet_weights;
    std::vector<std::size_t> packet_degrees;
    memory::aux_vector<std::uint8_t> encoded;
    std::vector<std::size_t> vertex_offsets;

    try {
      for (;;) {
        std::uint64_t packet_index;
        VertexId first_vertex;
        EdgeId first_arc;
        packet_targets.clear();
        packet_weights.clear();
        packet_degrees.clear();
        {
          std::unique_lock lock(shared.mutex);
          if (shared.exhausted || failed.load(std::memory_order_relaxed)) {
            return;
          }
          packet_index = shared.next_packet++;
          first_vertex = shared.next_vertex;
          first_arc = shared.arcs_consumed;
          EdgeId pulled = 0;
          while (pulled < packet_edge_budget) {
            if (!source.next(targets, weights)) {
              shared.exhausted = true;
              break;
            }
            ++shared.next_vertex;
            packet_degrees.push_back(targets.size());
            packet_targets.insert(packet_targets.end(), targets.begin(), targets.end());
            packet_weights.insert(packet_weights.end(), weights.begin(), weights.end());
            pulled += targets.size();
            shared.arcs_consumed += targets.size();
          }
        }
        if (packet_degrees.empty()) {
          return;
        }

        encoded.clear();
        vertex_offsets.clear();
        std::size_t arc_base = 0;
        EdgeId edge_id = first_arc;
        for (std::size_t i = 0; i < packet_degrees.size(); ++i) {
          vertex_offsets.push_back(encoded.size());
          const std::size_t deg = packet_degrees[i];
          compression::encode_neighborhood(
              first_vertex + static_cast<VertexId>(i),
              std::span<const VertexId>(packet_targets.data() + arc_base, deg),
              std::span<const EdgeWeight>(packet_weights.data() + arc_base, deg), edge_id, config,
              encoded
          );
          arc_base += deg;
          edge_id += deg;
        }
        total_arcs.fetch_add(arc_base, std::memory_order_relaxed);

        // Wait for all preceding packets to fix their byte ranges, claim
        // ours, hand the turn to the successor, then copy outside the
        // critical path. A failure elsewhere would leave the turn stuck, so
        // bail out instead of spinning on it.
        while (place_turn.load(std::memory_order_acquire) != packet_index) {
          if (failed.load(std::memory_order_relaxed)) {
            return;
          }
          std::this_thread::yield();
        }
        const std::size_t my_begin = blob_end;
        if (my_begin + encoded.size() > bound) {
          throw std::logic_error("compressed size exceeded its upper bound");
        }
        blob_end = my_begin + encoded.size();
        for (std::size_t i = 0; i < vertex_offsets.size(); ++i) {
          offsets.set(first_vertex + i, my_begin + vertex_offsets[i]);
        }
        if (stats != nullptr) {
          std::unique_lock lock(stats_mutex);
          local_stats.packets.push_back(
              {packet_index, first_vertex, static_cast<VertexId>(packet_degrees.size()), my_begin,
               my_begin + encoded.size()}
          );
        }
        place_turn.store(packet_index + 1, std::memory_order_release);
        std::memcpy(blob.data() + my_begin, encoded.data(), encoded.size());
      }
    } catch (...) {
      {
        std::unique_lock lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
      failed.store(true, std::memory_order_relaxed);
    }
  });
  if (failure) {
    std::rethrow_exception(failure);
  }

  offsets.set(n, blob_end);
  blob.commit_up_to(blob_end);

  if (shared.next_vertex != n) {
    throw IoError("stream ended after " + std::to_string(shared.next_vertex) + " of " +
                  std::to_string(n) + " neighborhoods");
  }
  const EdgeId arcs = total_arcs.load();
  if (arcs % 2 != 0) {
    throw IoError("stream produced an odd number of arcs; graph is not symmetric");
  }
  if (stats != nullptr) {
    std::sort(local_stats.packets.begin(), local_stats.packets.end(), [](const auto &a, const auto &b) {
      return a.index < b.index;
    });
    local_stats.reserved_bytes = bound;
    local_stats.committed_bytes = blob_end;
    *stats = std::move(local_stats);
  }
  return CompressedGraph(n, arcs / 2, source.take_vertex_weights(), std::move(offsets), std::move(blob), config);
}

} // namespace leanpart
