#pragma once

#include "cminet/consensus.hpp"
#include "cminet/network.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace cminet {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Fruchterman-Reingold force layout of the listed nodes in the unit square.
/// Positions depend only on the adjacency, the node list and the seed.
std::vector<Point> force_layout(const Adjacency& adj, const std::vector<Eigen::Index>& nodes,
                                std::uint64_t seed, int iterations = 500);

/// Standalone SVG. Isolated nodes are omitted; each drawn node is one
/// <circle>, each edge one <path>. When `weights` is given, stroke width
/// grows with the edge weight.
std::string render_network_svg(const BinaryNetwork& net, std::uint64_t layout_seed,
                               const Eigen::MatrixXi* weights = nullptr,
                               const std::string& title = {});

/// Consensus thresholded at t, annotated "t = k: N nodes, E edges".
std::string render_threshold_panel(const WeightedConsensus& c, int t, std::uint64_t layout_seed);

/// Annotated heatmap; throws RenderError unless `h` is square, symmetric,
/// zero on the diagonal and matches `labels`.
std::string render_hamming_heatmap(const Eigen::MatrixXi& h, const std::vector<std::string>& labels);

}  // namespace cminet
