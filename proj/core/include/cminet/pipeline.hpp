#pragma once

#include "cminet/config.hpp"
#include "cminet/consensus.hpp"
#include "cminet/methods.hpp"
#include "cminet/table.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cminet {

struct PreparedTable {
  CountTable table;
  Labels dropped_samples;  // zero library size
  Labels dropped_taxa;     // removed by the filter or constant before/after CLR
};

/// Loads, filters and removes degenerate samples and taxa. Throws LoadError
/// or FilterError; FilterError also when fewer than 4 samples or 3 taxa remain.
PreparedTable prepare_table(const PipelineConfig& cfg);
PreparedTable prepare_table(const CountTable& raw, double min_prevalence, double min_total);

/// Runs one method with the configured parameters.
MethodResult run_method(Method m, const CountTable& table, const PipelineConfig& cfg,
                        std::uint64_t seed, int workers);

/// Per-method seed stream; independent of which other methods are enabled.
std::uint64_t method_seed(std::uint64_t master, Method m);

struct MethodRun {
  Method method = Method::pearson;
  bool ok = false;
  std::string error;
  double seconds = 0.0;
  BinarizationRule rule;
  std::optional<MethodResult> result;
  std::optional<BinaryNetwork> network;
};

enum class RunStatus { complete = 0, partial = 3, no_consensus = 4 };

struct RunOutcome {
  PreparedTable prepared;
  std::vector<MethodRun> runs;
  std::optional<WeightedConsensus> consensus;
  std::vector<std::string> warnings;
  RunStatus status = RunStatus::complete;
};

/// Validates the config, runs every enabled method, builds the consensus and
/// writes all artifacts under cfg.output_dir(). Method failures are reported
/// on `log` and in the manifest and drop that method from the consensus.
RunOutcome run_pipeline(const PipelineConfig& cfg, std::ostream& log);

/// Consensus threshold used for network.svg when none is configured.
int default_render_threshold(int method_count);

/// Writes network.svg, threshold_panels/t_<k>.svg and hamming_heatmap.svg.
void write_renderings(const WeightedConsensus& c, const std::filesystem::path& dir,
                      std::uint64_t seed, std::optional<int> threshold);

struct StoredRun {
  WeightedConsensus consensus;
  std::uint64_t seed = 0;
  std::optional<int> render_threshold;
};

/// Rebuilds the consensus of a finished run from its output directory
/// (manifest.json plus methods/<m>_adjacency.tsv). Throws LoadError.
StoredRun load_run(const std::filesystem::path& dir);

}  // namespace cminet
