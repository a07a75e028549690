#pragma once

#include "cminet/methods.hpp"
#include "cminet/network.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace cminet {

struct BinarizationRule {
  enum class Kind { abs_threshold, top_quantile, pvalue, native_sparse };

  Kind kind = Kind::native_sparse;
  double value = 0.0;                   // threshold, quantile or alpha depending on kind
  std::optional<double> abs_threshold;  // extra magnitude filter for pvalue rules

  static BinarizationRule absolute(double threshold);
  static BinarizationRule top_quantile(double q);
  static BinarizationRule pvalue(double alpha, std::optional<double> abs = std::nullopt);
  static BinarizationRule native();

  /// Textual form, e.g. "abs_threshold(0.3)" or "pvalue(0.05)+abs_threshold(0.3)".
  std::string describe() const;
  /// Inverse of describe(); throws RuleError on malformed text.
  static BinarizationRule parse(const std::string& text);

  bool operator==(const BinarizationRule&) const = default;
};

BinarizationRule default_rule(Method m);

/// Throws RuleError when the rule does not fit the result (missing weights or
/// p-values, native_sparse on a method without a native network, bad value).
BinaryNetwork binarize(const MethodResult& result, const BinarizationRule& rule);

struct WeightedConsensus {
  Eigen::MatrixXi weights;
  std::vector<std::string> methods;
  std::vector<BinaryNetwork> networks;
  Labels taxa;

  int method_count() const { return static_cast<int>(networks.size()); }
};

/// Elementwise vote count. Method names come from `names` when given, else
/// from each network's provenance. Throws ConsensusError for fewer than two
/// networks or a roster mismatch (naming the first differing taxon).
WeightedConsensus build_consensus(std::vector<BinaryNetwork> nets,
                                  std::vector<std::string> names = {});

struct EdgeRecord {
  std::string taxon_a;
  std::string taxon_b;
  int weight = 0;
  std::vector<std::string> supporting_methods;
};

/// Edges with weight >= 1, labels ordered so taxon_a < taxon_b, sorted by
/// weight descending then by (taxon_a, taxon_b).
std::vector<EdgeRecord> edge_list(const WeightedConsensus& c);

/// Edge iff weight > t. Throws ThresholdError unless 0 <= t <= M.
BinaryNetwork threshold_network(const WeightedConsensus& c, int t);

struct SweepRow {
  int t = 0;
  long nodes = 0;
  long edges = 0;
};

/// One row per t in 0..M-1.
std::vector<SweepRow> threshold_sweep(const WeightedConsensus& c);

/// Number of unordered pairs whose adjacency differs.
long hamming_distance(const BinaryNetwork& a, const BinaryNetwork& b);
Eigen::MatrixXi hamming_matrix(const std::vector<BinaryNetwork>& nets);

/// Throws ConsensusError naming the first taxon where the rosters differ.
void require_same_roster(const Labels& a, const Labels& b);

}  // namespace cminet
