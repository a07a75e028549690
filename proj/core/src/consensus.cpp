#include "cminet/consensus.hpp"

#include "cminet/cmimn.hpp"
#include "cminet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>

namespace cminet {

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double parse_number(const std::string& s, const std::string& whole) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw RuleError("malformed binarization rule '" + whole + "'");
}

Adjacency adjacency_where(const Eigen::MatrixXd& m, auto&& keep) {
  const Eigen::Index p = m.rows();
  Adjacency adj = Adjacency::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (keep(i, j)) adj(i, j) = adj(j, i) = 1;
    }
  }
  return adj;
}

const Eigen::MatrixXd& require_weights(const MethodResult& r) {
  if (!r.weights) {
    throw RuleError("method " + std::string(to_string(r.method)) +
                    " has no weighted matrix to threshold");
  }
  return *r.weights;
}

}  // namespace

BinarizationRule BinarizationRule::absolute(double threshold) {
  return {Kind::abs_threshold, threshold, std::nullopt};
}
BinarizationRule BinarizationRule::top_quantile(double q) {
  return {Kind::top_quantile, q, std::nullopt};
}
BinarizationRule BinarizationRule::pvalue(double alpha, std::optional<double> abs) {
  return {Kind::pvalue, alpha, abs};
}
BinarizationRule BinarizationRule::native() { return {}; }

std::string BinarizationRule::describe() const {
  switch (kind) {
    case Kind::abs_threshold:
      return "abs_threshold(" + number(value) + ")";
    case Kind::top_quantile:
      return "top_quantile(" + number(value) + ")";
    case Kind::pvalue: {
      std::string s = "pvalue(" + number(value) + ")";
      if (abs_threshold) s += "+abs_threshold(" + number(*abs_threshold) + ")";
      return s;
    }
    case Kind::native_sparse:
      break;
  }
  return "native_sparse";
}

BinarizationRule BinarizationRule::parse(const std::string& text) {
  std::string t;
  for (char ch : text) {
    if (ch != ' ' && ch != '\t') t.push_back(ch);
  }
  if (t == "native_sparse" || t == "native") return native();
  static const std::regex single(R"(^(abs_threshold|top_quantile|pvalue)\(([^()]+)\)$)");
  static const std::regex combined(R"(^pvalue\(([^()]+)\)\+abs_threshold\(([^()]+)\)$)");
  std::smatch m;
  if (std::regex_match(t, m, combined)) {
    return pvalue(parse_number(m[1], text), parse_number(m[2], text));
  }
  if (std::regex_match(t, m, single)) {
    const double v = parse_number(m[2], text);
    if (m[1] == "abs_threshold") return absolute(v);
    if (m[1] == "top_quantile") return top_quantile(v);
    return pvalue(v);
  }
  throw RuleError("malformed binarization rule '" + text + "'");
}

BinarizationRule default_rule(Method m) {
  switch (m) {
    case Method::pearson:
    case Method::spearman:
    case Method::bicor:
    case Method::sparcc:
      return BinarizationRule::absolute(0.3);
    case Method::cclasso:
      return BinarizationRule::pvalue(0.05, 0.3);
    default:
      return BinarizationRule::native();
  }
}

BinaryNetwork binarize(const MethodResult& r, const BinarizationRule& rule) {
  const std::string name(to_string(r.method));
  switch (rule.kind) {
    case BinarizationRule::Kind::native_sparse:
      if (!emits_network(r.method) || !r.network) {
        throw RuleError("native_sparse rule on " + name + ", which has no native network");
      }
      return BinaryNetwork(r.network->adjacency(), r.network->taxa(), name);

    case BinarizationRule::Kind::abs_threshold: {
      if (!(rule.value > 0.0 && rule.value <= 1.0)) {
        throw RuleError("abs_threshold must lie in (0, 1]");
      }
      const auto& w = require_weights(r);
      return BinaryNetwork(
          adjacency_where(w, [&](auto i, auto j) { return std::abs(w(i, j)) >= rule.value; }),
          r.taxa, name);
    }

    case BinarizationRule::Kind::top_quantile: {
      if (!(rule.value > 0.0 && rule.value < 1.0)) {
        throw RuleError("top_quantile must lie in (0, 1)");
      }
      const auto& w = require_weights(r);
      std::vector<double> magnitudes;
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
          if (!std::isnan(w(i, j))) magnitudes.push_back(std::abs(w(i, j)));
        }
      }
      if (magnitudes.empty()) return BinaryNetwork::empty(r.taxa, name);
      const double cut = empirical_quantile(std::move(magnitudes), rule.value);
      return BinaryNetwork(
          adjacency_where(w, [&](auto i, auto j) { return std::abs(w(i, j)) >= cut; }), r.taxa,
          name);
    }

    case BinarizationRule::Kind::pvalue: {
      if (!(rule.value > 0.0 && rule.value <= 1.0)) throw RuleError("alpha must lie in (0, 1]");
      if (!r.pvalues) throw RuleError("method " + name + " reports no p-values");
      const auto& pv = *r.pvalues;
      const Eigen::MatrixXd* w = rule.abs_threshold ? &require_weights(r) : nullptr;
      return BinaryNetwork(adjacency_where(pv,
                                           [&](auto i, auto j) {
                                             if (!(pv(i, j) <= rule.value)) return false;
                                             return !w || std::abs((*w)(i, j)) >=
                                                              *rule.abs_threshold;
                                           }),
                           r.taxa, name);
    }
  }
  throw RuleError("unknown binarization rule");
}

void require_same_roster(const Labels& a, const Labels& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k] != b[k]) {
      throw ConsensusError("taxa rosters differ at position " + std::to_string(k + 1) + ": '" +
                           a[k] + "' vs '" + b[k] + "'");
    }
  }
  if (a.size() != b.size()) {
    const auto& longer = a.size() > b.size() ? a : b;
    throw ConsensusError("taxa rosters differ in length; first unmatched taxon '" + longer[n] +
                         "'");
  }
}

WeightedConsensus build_consensus(std::vector<BinaryNetwork> nets,
                                  std::vector<std::string> names) {
  if (nets.size() < 2) throw ConsensusError("a consensus needs at least two networks");
  if (!names.empty() && names.size() != nets.size()) {
    throw ConsensusError("method name count does not match network count");
  }
  WeightedConsensus c;
  c.taxa = nets.front().taxa();
  const Eigen::Index p = nets.front().size();
  c.weights = Eigen::MatrixXi::Zero(p, p);
  for (std::size_t k = 0; k < nets.size(); ++k) {
    require_same_roster(c.taxa, nets[k].taxa());
    c.weights += nets[k].adjacency();
    c.methods.push_back(names.empty() ? nets[k].provenance() : names[k]);
  }
  c.networks = std::move(nets);
  return c;
}

std::vector<EdgeRecord> edge_list(const WeightedConsensus& c) {
  std::vector<EdgeRecord> out;
  const Eigen::Index p = c.weights.rows();
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (c.weights(i, j) <= 0) continue;
      EdgeRecord e;
      e.taxon_a = c.taxa[i];
      e.taxon_b = c.taxa[j];
      if (e.taxon_b < e.taxon_a) std::swap(e.taxon_a, e.taxon_b);
      e.weight = c.weights(i, j);
      for (std::size_t m = 0; m < c.networks.size(); ++m) {
        if (c.networks[m].has_edge(i, j)) e.supporting_methods.push_back(c.methods[m]);
      }
      out.push_back(std::move(e));
    }
  }
  std::sort(out.begin(), out.end(), [](const EdgeRecord& a, const EdgeRecord& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.taxon_a != b.taxon_a) return a.taxon_a < b.taxon_a;
    return a.taxon_b < b.taxon_b;
  });
  return out;
}

BinaryNetwork threshold_network(const WeightedConsensus& c, int t) {
  if (t < 0 || t > c.method_count()) {
    throw ThresholdError("threshold " + std::to_string(t) + " outside 0.." +
                         std::to_string(c.method_count()));
  }
  Adjacency adj = (c.weights.array() > t).cast<int>();
  return BinaryNetwork(std::move(adj), c.taxa, "consensus>" + std::to_string(t));
}

std::vector<SweepRow> threshold_sweep(const WeightedConsensus& c) {
  std::vector<SweepRow> rows;
  for (int t = 0; t < c.method_count(); ++t) {
    const auto net = threshold_network(c, t);
    rows.push_back({t, net.connected_node_count(), net.edge_count()});
  }
  return rows;
}

long hamming_distance(const BinaryNetwork& a, const BinaryNetwork& b) {
  require_same_roster(a.taxa(), b.taxa());
  return (a.adjacency().array() != b.adjacency().array()).count() / 2;
}

Eigen::MatrixXi hamming_matrix(const std::vector<BinaryNetwork>& nets) {
  const auto m = static_cast<Eigen::Index>(nets.size());
  Eigen::MatrixXi h = Eigen::MatrixXi::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a + 1; b < m; ++b) {
      h(a, b) = h(b, a) = static_cast<int>(hamming_distance(nets[a], nets[b]));
    }
  }
  return h;
}

}  // namespace cminet
