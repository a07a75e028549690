#include "cminet/io.hpp"

#include "cminet/errors.hpp"
#include "cminet/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace cminet {

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += sep;
    out += parts[k];
  }
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, '\t')) out.push_back(field);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

template <class Matrix, class Fmt>
void write_matrix(const std::filesystem::path& path, const Labels& labels, const Matrix& m,
                  Fmt&& fmt) {
  if (static_cast<Eigen::Index>(labels.size()) != m.rows() || m.rows() != m.cols()) {
    throw ExportError("matrix and label sizes differ for '" + path.string() + "'");
  }
  std::string text = "taxon";
  for (const auto& l : labels) text += '\t' + l;
  text += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    text += labels[i];
    for (Eigen::Index j = 0; j < m.cols(); ++j) text += '\t' + fmt(m(i, j));
    text += '\n';
  }
  write_text(path, text);
}

std::string edge_list_text(const std::vector<EdgeRecord>& edges) {
  std::string text = "taxon_a\ttaxon_b\tweight\tsupporting_methods\n";
  for (const auto& e : edges) {
    text += e.taxon_a + '\t' + e.taxon_b + '\t' + std::to_string(e.weight) + '\t' +
            join(e.supporting_methods, ';') + '\n';
  }
  return text;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExportError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw ExportError("write to '" + path.string() + "' failed");
}

void write_labelled_matrix(const std::filesystem::path& path, const Labels& labels,
                           const Eigen::MatrixXi& m) {
  write_matrix(path, labels, m, [](int v) { return std::to_string(v); });
}

void write_labelled_matrix(const std::filesystem::path& path, const Labels& labels,
                           const Eigen::MatrixXd& m) {
  write_matrix(path, labels, m, [](double v) { return format_real(v); });
}

std::pair<Labels, Eigen::MatrixXi> read_labelled_int_matrix(const std::filesystem::path& path) {
  const auto raw = read_delimited_matrix(path);
  if (raw.row_labels != raw.col_labels) {
    throw LoadError("row and column labels differ in '" + path.string() + "'");
  }
  Eigen::MatrixXi m = raw.values.array().round().cast<int>();
  if (((m.cast<double>() - raw.values).array().abs() > 0.0).any()) {
    throw LoadError("non-integer entry in '" + path.string() + "'");
  }
  return {raw.row_labels, std::move(m)};
}

void write_edge_list(const std::filesystem::path& path, const std::vector<EdgeRecord>& edges) {
  write_text(path, edge_list_text(edges));
}

BinaryNetwork read_edge_list(const std::filesystem::path& path, const Labels& taxa,
                             std::string provenance) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::map<std::string, Eigen::Index> index;
  for (std::size_t k = 0; k < taxa.size(); ++k) index[taxa[k]] = static_cast<Eigen::Index>(k);
  const auto p = static_cast<Eigen::Index>(taxa.size());
  Adjacency adj = Adjacency::Zero(p, p);

  std::string line;
  if (!std::getline(in, line)) throw LoadError("'" + path.string() + "' is empty");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 3) {
      throw LoadError("edge list line " + std::to_string(line_no) + " has too few fields");
    }
    const auto a = index.find(fields[0]);
    const auto b = index.find(fields[1]);
    if (a == index.end() || b == index.end()) {
      throw LoadError("edge list line " + std::to_string(line_no) + " names an unknown taxon");
    }
    int weight = 0;
    try {
      weight = std::stoi(fields[2]);
    } catch (const std::exception&) {
      throw LoadError("edge list line " + std::to_string(line_no) + " has a malformed weight");
    }
    if (weight >= 1 && a->second != b->second) adj(a->second, b->second) = adj(b->second, a->second) = 1;
  }
  return BinaryNetwork(std::move(adj), taxa, std::move(provenance));
}

void write_sweep_table(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::string text = "threshold\tnodes\tedges\n";
  for (const auto& r : rows) {
    text += std::to_string(r.t) + '\t' + std::to_string(r.nodes) + '\t' +
            std::to_string(r.edges) + '\n';
  }
  write_text(path, text);
}

GraphFormat graph_format_from_string(const std::string& name) {
  if (name == "graphml") return GraphFormat::graphml;
  if (name == "dot") return GraphFormat::dot;
  if (name == "edgelist_tsv" || name == "tsv") return GraphFormat::edgelist_tsv;
  throw ExportError("unknown export format '" + name + "'");
}

std::string extension_of(GraphFormat f) {
  switch (f) {
    case GraphFormat::graphml: return ".graphml";
    case GraphFormat::dot: return ".dot";
    case GraphFormat::edgelist_tsv: break;
  }
  return ".tsv";
}

WeightedConsensus as_consensus(const BinaryNetwork& net) {
  WeightedConsensus c;
  c.weights = net.adjacency();
  c.taxa = net.taxa();
  c.methods = {net.provenance().empty() ? std::string("network") : net.provenance()};
  c.networks = {net};
  return c;
}

std::string to_graphml(const WeightedConsensus& c) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"\n"
      << "         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n"
      << "         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
         "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n"
      << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n"
      << "  <key id=\"methods\" for=\"edge\" attr.name=\"supporting_methods\" "
         "attr.type=\"string\"/>\n"
      << "  <graph id=\"consensus\" edgedefault=\"undirected\">\n";
  for (const auto& t : c.taxa) out << "    <node id=\"" << xml_escape(t) << "\"/>\n";
  for (const auto& e : edge_list(c)) {
    out << "    <edge source=\"" << xml_escape(e.taxon_a) << "\" target=\""
        << xml_escape(e.taxon_b) << "\">\n"
        << "      <data key=\"weight\">" << e.weight << "</data>\n"
        << "      <data key=\"methods\">" << xml_escape(join(e.supporting_methods, ';'))
        << "</data>\n"
        << "    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

std::string to_dot(const WeightedConsensus& c) {
  std::ostringstream out;
  out << "graph consensus {\n";
  for (const auto& t : c.taxa) out << "  " << dot_quote(t) << ";\n";
  for (const auto& e : edge_list(c)) {
    out << "  " << dot_quote(e.taxon_a) << " -- " << dot_quote(e.taxon_b)
        << " [weight=" << e.weight << ", penwidth=" << e.weight << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string to_edge_list_tsv(const WeightedConsensus& c) { return edge_list_text(edge_list(c)); }

void export_graph(const WeightedConsensus& c, GraphFormat format,
                  const std::filesystem::path& path) {
  switch (format) {
    case GraphFormat::graphml: write_text(path, to_graphml(c)); return;
    case GraphFormat::dot: write_text(path, to_dot(c)); return;
    case GraphFormat::edgelist_tsv: write_text(path, to_edge_list_tsv(c)); return;
  }
}

void export_graph(const BinaryNetwork& net, GraphFormat format,
                  const std::filesystem::path& path) {
  export_graph(as_consensus(net), format, path);
}

}  // namespace cminet
