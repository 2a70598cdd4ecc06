/*******************************************************************************
 * Batch CLI: multilevel partitioning with CSV reporting, plus a performance
 * profile tool over result tables.
 ******************************************************************************/
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "leanpart/graph_io.hpp"
#include "leanpart/partitioner.hpp"
#include "leanpart/perf_profile.hpp"

namespace {

using namespace leanpart;

constexpr int kUsageError = 2;

struct CliOptions {
  std::string graph_path;
  std::string format = "metis";
  std::string compress = "off";
  std::uint32_t k = 0;
  double epsilon = 0.03;
  std::uint64_t seed = 1;
  std::uint32_t repetitions = 1;
  int workers = 0;
  std::string refiner = "lp";
  std::string gain_table = "sparse";
  std::uint64_t t_bump = 10000;
  int rounds = 5;
  bool deterministic = false;
  std::string output_path;
  std::string report_path;
};

RunConfig to_run_config(const CliOptions &options, const std::uint64_t seed) {
  RunConfig config;
  config.k = options.k;
  config.epsilon = options.epsilon;
  config.seed = seed;
  config.workers = options.workers;
  config.coarsening_rounds = options.rounds;
  config.refinement_rounds = options.rounds;
  config.t_bump = options.t_bump;
  config.refiner = options.refiner == "lp+fm" ? RunConfig::Refiner::kLpFm : RunConfig::Refiner::kLp;
  if (options.gain_table == "dense") {
    config.gain_table = GainTableMode::kDense;
  } else if (options.gain_table == "none") {
    config.gain_table = GainTableMode::kNone;
  } else {
    config.gain_table = GainTableMode::kSparse;
  }
  config.deterministic = options.deterministic;
  return config;
}

std::string csv_row(
    const std::string &instance, const CliOptions &options, const std::string &seed,
    const RunReport &report
) {
  std::ostringstream row;
  row << instance << ',' << options.k << ',' << seed << ',' << report.cut << ','
      << report.imbalance << ',' << report.time_total_s << ',' << report.time_coarsen_s << ','
      << report.time_initial_s << ',' << report.time_refine_s << ',' << report.peak_aux_bytes
      << ',' << report.compression_ratio;
  return row.str();
}

int run_partition(const CliOptions &options) {
  const std::string instance = std::filesystem::path(options.graph_path).filename().string();

  // Load (and possibly compress during the read).
  const bool compressed = options.compress == "on";
  Graph graph;
  CompressedGraph compressed_graph;
  if (compressed) {
    WorkerPool io_pool(options.deterministic ? 1 : options.workers);
    auto source = options.format == "csrbin" ? open_csr_binary_source(options.graph_path)
                                             : open_metis_source(options.graph_path);
    compressed_graph = stream_compress(*source, {}, io_pool);
  } else if (options.format == "csrbin") {
    graph = read_csr_binary(options.graph_path);
  } else {
    MetisReadStats stats;
    graph = read_metis_graph(options.graph_path, &stats);
    if (stats.self_loops_dropped > 0 || stats.reverse_arcs_added > 0) {
      std::cerr << "note: dropped " << stats.self_loops_dropped << " self-loops, added "
                << stats.reverse_arcs_added << " reverse arcs\n";
    }
  }

  std::vector<std::string> rows;
  std::vector<BlockId> best_assignment;
  EdgeWeight best_cut = std::numeric_limits<EdgeWeight>::max();
  double cut_sum = 0.0;
  double imbalance_sum = 0.0;
  double time_sum = 0.0;

  for (std::uint32_t repetition = 0; repetition < options.repetitions; ++repetition) {
    const std::uint64_t seed = options.seed + repetition;
    const RunConfig config = to_run_config(options, seed);
    PartitionResult result = compressed ? partition_graph(compressed_graph, config)
                                        : partition_graph(graph, config);
    rows.push_back(csv_row(instance, options, std::to_string(seed), result.report));
    cut_sum += static_cast<double>(result.report.cut);
    imbalance_sum += result.report.imbalance;
    time_sum += result.report.time_total_s;
    if (result.report.cut < best_cut) {
      best_cut = result.report.cut;
      best_assignment = result.partition.assignment_snapshot();
    }
  }

  std::string output_path = options.output_path;
  if (output_path.empty()) {
    output_path = options.graph_path + ".part" + std::to_string(options.k);
  }
  write_partition_file(output_path, best_assignment);

  std::ostringstream csv;
  csv << "instance,k,seed,cut,imbalance,time_total_s,time_coarsen_s,time_initial_s,"
         "time_refine_s,peak_aux_bytes,compression_ratio\n";
  for (const auto &row : rows) {
    csv << row << '\n';
  }
  if (options.repetitions > 1) {
    // Aggregate row: arithmetic mean over the seeds.
    const double n = options.repetitions;
    csv << instance << ',' << options.k << ",mean," << cut_sum / n << ',' << imbalance_sum / n
        << ',' << time_sum / n << ",,,,,\n";
  }
  if (options.report_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(options.report_path);
    if (!out) {
      throw IoError("cannot write " + options.report_path);
    }
    out << csv.str();
  }
  std::cerr << "partition written to " << output_path << " (best cut " << best_cut << ")\n";
  return 0;
}

int run_profile(const std::string &input_path, const std::string &taus_arg, const std::string &output_path) {
  std::ifstream in(input_path);
  if (!in) {
    throw IoError("cannot open " + input_path);
  }
  std::vector<ProfileRun> runs;
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    if (header) {
      header = false;
      continue;
    }
    std::istringstream fields(line);
    ProfileRun run;
    std::string cut;
    if (!std::getline(fields, run.algorithm, ',') || !std::getline(fields, run.instance, ',') ||
        !std::getline(fields, cut, ',')) {
      throw IoError(input_path + ":" + std::to_string(line_no) + ": expected algorithm,instance,cut");
    }
    run.cut = std::stod(cut);
    runs.push_back(std::move(run));
  }

  std::vector<double> taus;
  std::istringstream tau_stream(taus_arg);
  std::string tau;
  while (std::getline(tau_stream, tau, ',')) {
    taus.push_back(std::stod(tau));
  }

  const auto points = performance_profile(runs, taus);
  std::ostringstream csv;
  csv << "tau,algorithm,fraction\n";
  for (const auto &point : points) {
    csv << point.tau << ',' << point.algorithm << ',' << point.fraction << '\n';
  }
  if (output_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(output_path);
    if (!out) {
      throw IoError("cannot write " + output_path);
    }
    out << csv.str();
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"memory-lean multilevel graph partitioner"};
  app.require_subcommand(1);

  CliOptions options;
  auto *partition_cmd = app.add_subcommand("partition", "partition a graph into k blocks");
  partition_cmd->add_option("--graph", options.graph_path, "input graph file")->required();
  partition_cmd->add_option("--format", options.format, "input format")
      ->check(CLI::IsMember({"metis", "csrbin"}));
  partition_cmd->add_option("--compress", options.compress, "compress the input during loading")
      ->check(CLI::IsMember({"on", "off"}));
  partition_cmd->add_option("--k", options.k, "number of blocks")->required();
  partition_cmd->add_option("--epsilon", options.epsilon, "imbalance parameter (default 0.03)");
  partition_cmd->add_option("--seed", options.seed, "first random seed");
  partition_cmd->add_option("--repetitions", options.repetitions, "number of seeded runs");
  partition_cmd->add_option("--workers", options.workers, "worker threads (0 = hardware)");
  partition_cmd->add_option("--refiner", options.refiner, "refinement algorithms")
      ->check(CLI::IsMember({"lp", "lp+fm"}));
  partition_cmd->add_option("--gain-table", options.gain_table, "gain table mode for FM")
      ->check(CLI::IsMember({"sparse", "dense", "none"}));
  partition_cmd->add_option("--t-bump", options.t_bump, "two-phase bump threshold");
  partition_cmd->add_option("--rounds", options.rounds, "LP rounds per level");
  partition_cmd->add_flag("--deterministic", options.deterministic, "one worker, fixed tie breaks");
  partition_cmd->add_option("--output", options.output_path, "partition file path");
  partition_cmd->add_option("--report", options.report_path, "CSV report path (default stdout)");

  std::string profile_input;
  std::string profile_taus = "1,1.01,1.05,1.1,1.5,2";
  std::string profile_output;
  auto *profile_cmd = app.add_subcommand("profile", "performance profile over a result table");
  profile_cmd->add_option("--input", profile_input, "CSV with algorithm,instance,cut rows")->required();
  profile_cmd->add_option("--taus", profile_taus, "comma-separated tau grid");
  profile_cmd->add_option("--output", profile_output, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (partition_cmd->parsed()) {
      if (options.k == 0) {
        std::cerr << "error: --k must be at least 1\n";
        return kUsageError;
      }
      if (options.repetitions == 0) {
        std::cerr << "error: --repetitions must be at least 1\n";
        return kUsageError;
      }
      return run_partition(options);
    }
    return run_profile(profile_input, profile_taus, profile_output);
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
