#include "cminet/network.hpp"

#include "cminet/errors.hpp"

namespace cminet {

BinaryNetwork::BinaryNetwork(Adjacency adj, Labels taxa, std::string provenance)
    : adj_(std::move(adj)), taxa_(std::move(taxa)), provenance_(std::move(provenance)) {
  if (adj_.rows() != adj_.cols() || adj_.rows() != static_cast<Eigen::Index>(taxa_.size())) {
    throw ConsensusError("adjacency shape does not match the taxa roster");
  }
  for (Eigen::Index i = 0; i < adj_.rows(); ++i) {
    if (adj_(i, i) != 0) throw ConsensusError("adjacency diagonal must be zero");
    for (Eigen::Index j = i + 1; j < adj_.cols(); ++j) {
      const int a = adj_(i, j);
      if ((a != 0 && a != 1) || a != adj_(j, i)) {
        throw ConsensusError("adjacency must be symmetric over {0,1}");
      }
    }
  }
}

BinaryNetwork BinaryNetwork::empty(Labels taxa, std::string provenance) {
  const auto p = static_cast<Eigen::Index>(taxa.size());
  return BinaryNetwork(Adjacency::Zero(p, p), std::move(taxa), std::move(provenance));
}

long BinaryNetwork::edge_count() const { return adj_.sum() / 2; }

long BinaryNetwork::connected_node_count() const {
  return static_cast<long>((adj_.rowwise().sum().array() > 0).count());
}

}  // namespace cminet
