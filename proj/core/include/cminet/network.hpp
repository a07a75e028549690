#pragma once

#include "cminet/table.hpp"

#include <Eigen/Core>

#include <string>

namespace cminet {

using Adjacency = Eigen::MatrixXi;

/// Symmetric 0/1 adjacency with zero diagonal over a labelled taxa roster.
class BinaryNetwork {
 public:
  BinaryNetwork() = default;
  /// Throws ConsensusError if the adjacency is not square, symmetric, 0/1
  /// valued with zero diagonal, or does not match the roster size.
  BinaryNetwork(Adjacency adj, Labels taxa, std::string provenance = {});

  static BinaryNetwork empty(Labels taxa, std::string provenance = {});

  const Adjacency& adjacency() const { return adj_; }
  const Labels& taxa() const { return taxa_; }
  const std::string& provenance() const { return provenance_; }
  Eigen::Index size() const { return adj_.rows(); }

  bool has_edge(Eigen::Index i, Eigen::Index j) const { return adj_(i, j) != 0; }
  long edge_count() const;
  /// Nodes with at least one incident edge.
  long connected_node_count() const;

  bool operator==(const BinaryNetwork& other) const {
    return taxa_ == other.taxa_ && adj_ == other.adj_;
  }

 private:
  Adjacency adj_;
  Labels taxa_;
  std::string provenance_;
};

}  // namespace cminet
