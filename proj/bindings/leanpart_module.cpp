/*******************************************************************************
 * Python bindings for the main operations: loading, compression,
 * partitioning and cut metrics.
 ******************************************************************************/
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "leanpart/graph_io.hpp"
#include "leanpart/partitioner.hpp"
#include "leanpart/perf_profile.hpp"

namespace py = pybind11;
using namespace leanpart;

namespace {

Graph graph_from_edges(
    const VertexId n,
    const std::vector<std::tuple<VertexId, VertexId, EdgeWeight>> &edges,
    const std::vector<VertexWeight> &vertex_weights
) {
  std::vector<std::vector<std::pair<VertexId, EdgeWeight>>> adj(n);
  for (const auto &[u, v, w] : edges) {
    if (u >= n || v >= n) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (u == v) {
      continue;
    }
    if (w <= 0) {
      throw std::invalid_argument("edge weights must be positive");
    }
    adj[u].emplace_back(v, w);
    adj[v].emplace_back(u, w);
  }
  std::vector<EdgeId> offsets(n + 1, 0);
  for (VertexId u = 0; u < n; ++u) {
    std::sort(adj[u].begin(), adj[u].end());
    adj[u].erase(std::unique(adj[u].begin(), adj[u].end()), adj[u].end());
    offsets[u + 1] = offsets[u] + adj[u].size();
  }
  std::vector<VertexId> targets(offsets.back());
  std::vector<EdgeWeight> weights(offsets.back());
  for (VertexId u = 0; u < n; ++u) {
    EdgeId e = offsets[u];
    for (const auto &[v, w] : adj[u]) {
      targets[e] = v;
      weights[e] = w;
      ++e;
    }
  }
  std::vector<VertexWeight> vw = vertex_weights;
  if (vw.empty()) {
    vw.assign(n, 1);
  } else if (vw.size() != n) {
    throw std::invalid_argument("vertex weight list length must equal n");
  }
  return Graph(std::move(offsets), std::move(targets), std::move(weights), std::move(vw));
}

RunConfig make_config(
    const BlockId k,
    const double epsilon,
    const std::uint64_t seed,
    const int workers,
    const std::string &refiner,
    const std::string &gain_table,
    const std::uint64_t t_bump,
    const int rounds,
    const bool deterministic
) {
  RunConfig config;
  config.k = k;
  config.epsilon = epsilon;
  config.seed = seed;
  config.workers = workers;
  config.coarsening_rounds = rounds;
  config.refinement_rounds = rounds;
  config.t_bump = t_bump;
  config.deterministic = deterministic;
  if (refiner == "lp+fm") {
    config.refiner = RunConfig::Refiner::kLpFm;
  } else if (refiner == "lp") {
    config.refiner = RunConfig::Refiner::kLp;
  } else {
    throw std::invalid_argument("refiner must be 'lp' or 'lp+fm'");
  }
  if (gain_table == "sparse") {
    config.gain_table = GainTableMode::kSparse;
  } else if (gain_table == "dense") {
    config.gain_table = GainTableMode::kDense;
  } else if (gain_table == "none") {
    config.gain_table = GainTableMode::kNone;
  } else {
    throw std::invalid_argument("gain_table must be 'sparse', 'dense' or 'none'");
  }
  return config;
}

py::dict report_to_dict(const RunReport &report) {
  py::dict out;
  out["cut"] = report.cut;
  out["imbalance"] = report.imbalance;
  out["time_total_s"] = report.time_total_s;
  out["time_coarsen_s"] = report.time_coarsen_s;
  out["time_initial_s"] = report.time_initial_s;
  out["time_refine_s"] = report.time_refine_s;
  out["peak_aux_bytes"] = report.peak_aux_bytes;
  out["peak_aux_cluster_bytes"] = report.peak_aux_cluster_bytes;
  out["peak_aux_contract_bytes"] = report.peak_aux_contract_bytes;
  out["peak_aux_initial_bytes"] = report.peak_aux_initial_bytes;
  out["peak_aux_refine_bytes"] = report.peak_aux_refine_bytes;
  out["compression_ratio"] = report.compression_ratio;
  py::list levels;
  for (const auto &level : report.levels) {
    levels.append(py::make_tuple(level.n, level.m));
  }
  out["levels"] = levels;
  return out;
}

template <GraphLike G>
py::tuple run_partition(const G &g, const RunConfig &config) {
  PartitionResult result = partition_graph(g, config);
  return py::make_tuple(result.partition.assignment_snapshot(), report_to_dict(result.report));
}

} // namespace

PYBIND11_MODULE(_leanpart, m) {
  m.doc() = "Memory-lean multilevel graph partitioning";

  py::class_<Graph>(m, "Graph")
      .def_property_readonly("n", &Graph::n)
      .def_property_readonly("m", &Graph::m)
      .def("degree", &Graph::degree, py::arg("u"))
      .def("vertex_weight", &Graph::vertex_weight, py::arg("u"))
      .def_property_readonly("total_vertex_weight", &Graph::total_vertex_weight)
      .def(
          "neighbors",
          [](const Graph &g, const VertexId u) {
            std::vector<std::pair<VertexId, EdgeWeight>> out;
            g.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
              out.emplace_back(v, w);
            });
            return out;
          },
          py::arg("u")
      )
      .def("validate", [](const Graph &g) { return validate_graph(g); });

  py::class_<CompressedGraph>(m, "CompressedGraph")
      .def_property_readonly("n", &CompressedGraph::n)
      .def_property_readonly("m", &CompressedGraph::m)
      .def("degree", &CompressedGraph::degree, py::arg("u"))
      .def_property_readonly("byte_size", &CompressedGraph::encoded_byte_size)
      .def_property_readonly(
          "compression_ratio", [](const CompressedGraph &cg) { return compression_ratio(cg); }
      )
      .def(
          "neighbors",
          [](const CompressedGraph &cg, const VertexId u) {
            std::vector<std::pair<VertexId, EdgeWeight>> out;
            cg.neighbors(u, [&](EdgeId, const VertexId v, const EdgeWeight w) {
              out.emplace_back(v, w);
            });
            return out;
          },
          py::arg("u")
      );

  m.def(
      "graph_from_edges", &graph_from_edges, py::arg("n"), py::arg("edges"),
      py::arg("vertex_weights") = std::vector<VertexWeight>{},
      "Build a graph from undirected (u, v, weight) triples."
  );
  m.def("load_metis", [](const std::string &path) { return read_metis_graph(path); }, py::arg("path"));
  m.def("load_csr_binary", &read_csr_binary, py::arg("path"));
  m.def(
      "compress",
      [](const Graph &g) { return compress_graph(g); },
      py::arg("graph"),
      "Compress a graph (gap + interval encoded neighborhoods)."
  );

  const auto partition_doc =
      "Partition into k blocks; returns (assignment list, report dict).";
  m.def(
      "partition",
      [](const Graph &g, const BlockId k, const double epsilon, const std::uint64_t seed,
         const int workers, const std::string &refiner, const std::string &gain_table,
         const std::uint64_t t_bump, const int rounds, const bool deterministic) {
        return run_partition(
            g, make_config(k, epsilon, seed, workers, refiner, gain_table, t_bump, rounds, deterministic)
        );
      },
      py::arg("graph"), py::arg("k"), py::arg("epsilon") = 0.03, py::arg("seed") = 1,
      py::arg("workers") = 0, py::arg("refiner") = "lp", py::arg("gain_table") = "sparse",
      py::arg("t_bump") = 10000, py::arg("rounds") = 5, py::arg("deterministic") = false,
      partition_doc
  );
  m.def(
      "partition_compressed",
      [](const CompressedGraph &g, const BlockId k, const double epsilon, const std::uint64_t seed,
         const int workers, const std::string &refiner, const std::string &gain_table,
         const std::uint64_t t_bump, const int rounds, const bool deterministic) {
        return run_partition(
            g, make_config(k, epsilon, seed, workers, refiner, gain_table, t_bump, rounds, deterministic)
        );
      },
      py::arg("graph"), py::arg("k"), py::arg("epsilon") = 0.03, py::arg("seed") = 1,
      py::arg("workers") = 0, py::arg("refiner") = "lp", py::arg("gain_table") = "sparse",
      py::arg("t_bump") = 10000, py::arg("rounds") = 5, py::arg("deterministic") = false,
      partition_doc
  );

  m.def(
      "edge_cut",
      [](const Graph &g, const std::vector<BlockId> &assignment) {
        if (assignment.size() != g.n()) {
          throw std::invalid_argument("assignment length must equal n");
        }
        BlockId k = 0;
        for (const BlockId b : assignment) {
          k = std::max(k, b);
        }
        Partition p(g.n(), k + 1, 1.0, g.total_vertex_weight(), g.max_vertex_weight());
        for (VertexId u = 0; u < g.n(); ++u) {
          p.set_block(u, assignment[u]);
        }
        p.rebuild_block_weights(g);
        return edge_cut(g, p);
      },
      py::arg("graph"), py::arg("assignment")
  );
  m.def("max_block_weight", &max_block_weight, py::arg("total_weight"), py::arg("k"), py::arg("epsilon"));
  m.def(
      "performance_profile",
      [](const std::vector<std::tuple<std::string, std::string, double>> &runs,
         const std::vector<double> &taus) {
        std::vector<ProfileRun> converted;
        converted.reserve(runs.size());
        for (const auto &[algorithm, instance, cut] : runs) {
          converted.push_back({algorithm, instance, cut});
        }
        std::vector<std::tuple<double, std::string, double>> out;
        for (const auto &point : performance_profile(converted, taus)) {
          out.emplace_back(point.tau, point.algorithm, point.fraction);
        }
        return out;
      },
      py::arg("runs"), py::arg("taus"),
      "Fractions of instances within factor tau of the best cut."
  );
}
