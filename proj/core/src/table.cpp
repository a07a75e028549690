#include "cminet/table.hpp"

#include "cminet/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <string_view>

namespace cminet {

namespace {

std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

void check_unique(const Labels& labels, const char* what) {
  std::set<std::string_view> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw LoadError(std::string("duplicate ") + what + " label '" + l + "'");
    }
  }
}

}  // namespace

CountTable::CountTable(Eigen::MatrixXd values, Labels samples, Labels taxa)
    : values_(std::move(values)), samples_(std::move(samples)), taxa_(std::move(taxa)) {
  if (static_cast<Eigen::Index>(samples_.size()) != values_.rows() ||
      static_cast<Eigen::Index>(taxa_.size()) != values_.cols()) {
    throw LoadError("label counts do not match the matrix shape");
  }
  check_unique(samples_, "sample");
  check_unique(taxa_, "taxon");
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      const double v = values_(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw LoadError("invalid abundance at sample '" + samples_[i] + "', taxon '" +
                        taxa_[j] + "'");
      }
    }
  }
}

CountTable CountTable::select_taxa(const std::vector<Eigen::Index>& columns) const {
  Eigen::MatrixXd v(values_.rows(), static_cast<Eigen::Index>(columns.size()));
  Labels t;
  t.reserve(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    v.col(static_cast<Eigen::Index>(k)) = values_.col(columns[k]);
    t.push_back(taxa_[columns[k]]);
  }
  return CountTable(std::move(v), samples_, std::move(t));
}

CountTable CountTable::select_samples(const std::vector<Eigen::Index>& rows) const {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(rows.size()), values_.cols());
  Labels s;
  s.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    v.row(static_cast<Eigen::Index>(k)) = values_.row(rows[k]);
    s.push_back(samples_[rows[k]]);
  }
  return CountTable(std::move(v), std::move(s), taxa_);
}

DelimitedMatrix read_delimited_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw LoadError("'" + path.string() + "' is empty");
  const char delim = line.find('\t') != std::string::npos ? '\t' : ',';

  auto header = split(line, delim);
  if (header.size() < 2) throw LoadError("header has no data columns");
  DelimitedMatrix out;
  out.corner = std::string(trim(header.front()));
  for (std::size_t k = 1; k < header.size(); ++k) out.col_labels.emplace_back(trim(header[k]));

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, delim);
    const std::size_t row = rows.size() + 1;
    if (fields.size() != header.size()) {
      throw LoadError("ragged row " + std::to_string(row) + " (line " +
                      std::to_string(line_no) + "): expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    out.row_labels.emplace_back(trim(fields.front()));
    std::vector<double> values(header.size() - 1);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      if (!parse_double(fields[k], values[k - 1])) {
        throw LoadError("non-numeric or missing cell at row " + std::to_string(row) + " ('" +
                        out.row_labels.back() + "'), column '" + out.col_labels[k - 1] +
                        "': '" + fields[k] + "'");
      }
    }
    rows.push_back(std::move(values));
  }

  out.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(out.col_labels.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

CountTable load_count_table(const std::filesystem::path& path, Orientation orientation) {
  auto raw = read_delimited_matrix(path);
  for (Eigen::Index i = 0; i < raw.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < raw.values.cols(); ++j) {
      if (raw.values(i, j) < 0.0) {
        throw LoadError("negative value at row " + std::to_string(i + 1) + " ('" +
                        raw.row_labels[i] + "'), column '" + raw.col_labels[j] + "'");
      }
    }
  }
  check_unique(raw.row_labels, "row");
  check_unique(raw.col_labels, "column");
  if (orientation == Orientation::taxa_in_rows) {
    Eigen::MatrixXd v = raw.values.transpose();
    return CountTable(std::move(v), std::move(raw.col_labels), std::move(raw.row_labels));
  }
  return CountTable(std::move(raw.values), std::move(raw.row_labels), std::move(raw.col_labels));
}

void write_count_table(const CountTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write '" + path.string() + "'");
  out << "sample";
  for (const auto& t : table.taxa()) out << '\t' << t;
  out << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < table.n_samples(); ++i) {
    out << table.samples()[i];
    for (Eigen::Index j = 0; j < table.n_taxa(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, table.values()(i, j));
      out << '\t' << std::string_view(buf, ptr - buf);
    }
    out << '\n';
  }
}

CountTable filter_taxa(const CountTable& table, double min_prevalence, double min_total) {
  if (min_prevalence < 0.0 || min_prevalence > 1.0 || min_total < 0.0) {
    throw FilterError("filter parameters out of range");
  }
  const auto& v = table.values();
  const double needed = min_prevalence * static_cast<double>(table.n_samples());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const auto present = (v.col(j).array() > 0.0).count();
    if (static_cast<double>(present) >= needed && v.col(j).sum() >= min_total) keep.push_back(j);
  }
  if (keep.empty()) throw FilterError("all taxa removed by the filter");
  return table.select_taxa(keep);
}

CompositionTable to_composition(const CountTable& table, double pseudo) {
  if (pseudo < 0.0) throw TransformError("pseudo-count must be nonnegative");
  const auto& v = table.values();
  if (pseudo == 0.0 && (v.array() <= 0.0).any()) {
    throw TransformError("zeros present; a positive pseudo-count is required");
  }
  CompositionTable out;
  out.values = v.array() + pseudo;
  for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
    out.values.row(i) /= out.values.row(i).sum();
  }
  out.samples = table.samples();
  out.taxa = table.taxa();
  out.pseudo = pseudo;
  return out;
}

TransformedTable clr_transform(const CompositionTable& composition) {
  const auto& c = composition.values;
  if ((c.array() <= 0.0).any()) throw TransformError("CLR requires strictly positive entries");
  TransformedTable out;
  out.values = c.array().log().matrix();
  for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
    out.values.row(i).array() -= out.values.row(i).mean();
  }
  out.transform = Transform::clr;
  out.samples = composition.samples;
  out.taxa = composition.taxa;
  return out;
}

Eigen::MatrixXd mclr_matrix(const Eigen::MatrixXd& v, MclrShift shift, const Labels* samples) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(v.rows(), v.cols());
  double min_nonzero = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (v(i, j) > 0.0) {
        sum += std::log(v(i, j));
        ++count;
      }
    }
    if (count == 0) {
      const std::string name = samples ? (*samples)[i] : std::to_string(i + 1);
      throw TransformError("sample '" + name + "' has no nonzero entries");
    }
    const double mean = sum / count;
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (v(i, j) > 0.0) {
        z(i, j) = std::log(v(i, j)) - mean;
        min_nonzero = std::min(min_nonzero, z(i, j));
      }
    }
  }
  const double offset =
      shift.kind == MclrShift::Kind::automatic ? 1.0 - min_nonzero : shift.value;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (v(i, j) > 0.0) z(i, j) += offset;
    }
  }
  return z;
}

TransformedTable mclr_transform(const CountTable& table, MclrShift shift) {
  TransformedTable out;
  out.values = mclr_matrix(table.values(), shift, &table.samples());
  out.transform = Transform::mclr;
  out.samples = table.samples();
  out.taxa = table.taxa();
  return out;
}

}  // namespace cminet
