// cminet: consensus microbial network inference from a count table.

#include "cminet/config.hpp"
#include "cminet/consensus.hpp"
#include "cminet/errors.hpp"
#include "cminet/io.hpp"
#include "cminet/pipeline.hpp"
#include "cminet/render.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace cminet;

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;

struct GlobalOptions {
  std::string config;
  std::optional<long long> seed;
  std::optional<int> jobs;
  std::string out;
};

PipelineConfig resolve_config(const GlobalOptions& g) {
  PipelineConfig cfg = g.config.empty() ? PipelineConfig() : PipelineConfig::load(g.config);
  if (g.seed) cfg.set("run.seed", std::to_string(*g.seed));
  if (g.jobs) cfg.set("run.jobs", std::to_string(*g.jobs));
  if (!g.out.empty()) cfg.set("output.dir", g.out);
  return cfg;
}

fs::path run_dir(const GlobalOptions& g) {
  if (!g.out.empty()) return g.out;
  return resolve_config(g).output_dir();
}

int cmd_run(const GlobalOptions& g) {
  const auto cfg = resolve_config(g);
  const auto outcome = run_pipeline(cfg, std::cerr);
  int ok = 0;
  for (const auto& r : outcome.runs) ok += r.ok ? 1 : 0;
  std::cout << "methods succeeded: " << ok << "/" << outcome.runs.size() << "\n";
  if (outcome.consensus) {
    std::cout << "consensus edges (weight >= 1): " << edge_list(*outcome.consensus).size() << "\n";
  }
  std::cout << "outputs written to " << cfg.output_dir().string() << "\n";
  return static_cast<int>(outcome.status);
}

int cmd_threshold(const GlobalOptions& g, int t) {
  const fs::path dir = run_dir(g);
  const auto stored = load_run(dir);
  const auto net = threshold_network(stored.consensus, t);
  const fs::path path = dir / ("threshold_" + std::to_string(t) + "_adjacency.tsv");
  write_labelled_matrix(path, net.taxa(), net.adjacency());
  std::cout << "t = " << t << ": " << net.connected_node_count() << " nodes, "
            << net.edge_count() << " edges -> " << path.string() << "\n";
  return 0;
}

int cmd_export(const GlobalOptions& g, const std::string& format_name, std::optional<int> t) {
  const fs::path dir = run_dir(g);
  const auto stored = load_run(dir);
  const auto format = graph_format_from_string(format_name);
  fs::path path;
  if (t) {
    path = dir / ("consensus_t" + std::to_string(*t) + extension_of(format));
    export_graph(threshold_network(stored.consensus, *t), format, path);
  } else {
    path = dir / ("consensus" + extension_of(format));
    export_graph(stored.consensus, format, path);
  }
  std::cout << path.string() << "\n";
  return 0;
}

int cmd_sweep(const GlobalOptions& g) {
  const fs::path dir = run_dir(g);
  const auto rows = threshold_sweep(load_run(dir).consensus);
  write_sweep_table(dir / "threshold_sweep.tsv", rows);
  std::cout << "threshold\tnodes\tedges\n";
  for (const auto& r : rows) std::cout << r.t << '\t' << r.nodes << '\t' << r.edges << '\n';
  return 0;
}

int cmd_hamming(const GlobalOptions& g) {
  const fs::path dir = run_dir(g);
  const auto c = load_run(dir).consensus;
  const auto h = hamming_matrix(c.networks);
  write_labelled_matrix(dir / "hamming_matrix.tsv", c.methods, h);
  std::cout << "method";
  for (const auto& m : c.methods) std::cout << '\t' << m;
  std::cout << '\n';
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    std::cout << c.methods[i];
    for (Eigen::Index j = 0; j < h.cols(); ++j) std::cout << '\t' << h(i, j);
    std::cout << '\n';
  }
  return 0;
}

int cmd_render(const GlobalOptions& g, std::optional<int> t) {
  const fs::path dir = run_dir(g);
  const auto stored = load_run(dir);
  const std::uint64_t seed = g.seed ? static_cast<std::uint64_t>(*g.seed) : stored.seed;
  write_renderings(stored.consensus, dir, seed, t ? t : stored.render_threshold);
  std::cout << "rendered network.svg, threshold_panels/ and hamming_heatmap.svg in "
            << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus microbial network inference"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config, "Config file (key = value) or a run manifest.json");
  app.add_option("--seed", g.seed, "Master seed (overrides run.seed)");
  app.add_option("--jobs", g.jobs, "Worker threads (overrides run.jobs)")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory (overrides output.dir)");

  auto* run = app.add_subcommand("run", "Run every enabled method and build the consensus");

  int t = 0;
  auto* threshold = app.add_subcommand("threshold", "Write the consensus thresholded at t");
  threshold->add_option("--t", t, "Keep edges with weight > t")->required();

  std::string format;
  std::optional<int> export_t;
  auto* exporter = app.add_subcommand("export", "Export the consensus graph");
  exporter->add_option("--format", format, "graphml | dot | edgelist_tsv")
      ->required()
      ->check(CLI::IsMember({"graphml", "dot", "edgelist_tsv"}));
  exporter->add_option("--t", export_t, "Export the network thresholded at t instead");

  auto* sweep = app.add_subcommand("sweep", "Nodes and edges per consensus threshold");
  auto* hamming = app.add_subcommand("hamming", "Pairwise Hamming distances between methods");

  std::optional<int> render_t;
  auto* render = app.add_subcommand("render", "Write SVG renderings of a finished run");
  render->add_option("--t", render_t, "Threshold for network.svg");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(g);
    if (*threshold) return cmd_threshold(g, t);
    if (*exporter) return cmd_export(g, format, export_t);
    if (*sweep) return cmd_sweep(g);
    if (*hamming) return cmd_hamming(g);
    if (*render) return cmd_render(g, render_t);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
