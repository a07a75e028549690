#pragma once

#include "cminet/consensus.hpp"
#include "cminet/network.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace cminet {

/// "%.6g" formatting used for every real-valued output.
std::string format_real(double v);

/// Tab-delimited square matrix with taxa (or method) labels on both axes.
void write_labelled_matrix(const std::filesystem::path& path, const Labels& labels,
                           const Eigen::MatrixXi& m);
void write_labelled_matrix(const std::filesystem::path& path, const Labels& labels,
                           const Eigen::MatrixXd& m);

/// Reads a square labelled integer matrix; row and column labels must agree.
std::pair<Labels, Eigen::MatrixXi> read_labelled_int_matrix(const std::filesystem::path& path);

void write_edge_list(const std::filesystem::path& path, const std::vector<EdgeRecord>& edges);
/// Rebuilds an adjacency over `taxa` from an edge list; every row with weight
/// >= 1 becomes an edge. Unknown taxa raise LoadError.
BinaryNetwork read_edge_list(const std::filesystem::path& path, const Labels& taxa,
                             std::string provenance = {});

void write_sweep_table(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

enum class GraphFormat { graphml, dot, edgelist_tsv };

GraphFormat graph_format_from_string(const std::string& name);
std::string extension_of(GraphFormat f);

/// Wraps a single network so the consensus exporters can handle it; each edge
/// gets weight 1 and the network's provenance as its supporting method.
WeightedConsensus as_consensus(const BinaryNetwork& net);

std::string to_graphml(const WeightedConsensus& c);
std::string to_dot(const WeightedConsensus& c);
std::string to_edge_list_tsv(const WeightedConsensus& c);

/// Throws ExportError on I/O failure.
void export_graph(const WeightedConsensus& c, GraphFormat format,
                  const std::filesystem::path& path);
void export_graph(const BinaryNetwork& net, GraphFormat format,
                  const std::filesystem::path& path);

/// Writes `text` to `path`, throwing ExportError when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cminet
