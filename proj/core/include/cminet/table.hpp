#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace cminet {

using Labels = std::vector<std::string>;

enum class Orientation { samples_in_rows, taxa_in_rows };

/// Samples x taxa matrix of nonnegative abundances.
///
/// Construction validates the invariants (nonnegative finite values, unique
/// labels, label counts matching the matrix shape) and throws LoadError
/// otherwise. Instances are immutable once built.
class CountTable {
 public:
  CountTable(Eigen::MatrixXd values, Labels samples, Labels taxa);

  const Eigen::MatrixXd& values() const { return values_; }
  const Labels& samples() const { return samples_; }
  const Labels& taxa() const { return taxa_; }
  Eigen::Index n_samples() const { return values_.rows(); }
  Eigen::Index n_taxa() const { return values_.cols(); }

  /// Restricts to the given taxon columns, preserving the given order.
  CountTable select_taxa(const std::vector<Eigen::Index>& columns) const;
  /// Restricts to the given sample rows, preserving the given order.
  CountTable select_samples(const std::vector<Eigen::Index>& rows) const;

 private:
  Eigen::MatrixXd values_;
  Labels samples_;
  Labels taxa_;
};

/// Row-closed strictly positive compositions.
struct CompositionTable {
  Eigen::MatrixXd values;
  Labels samples;
  Labels taxa;
  double pseudo = 0.0;
};

enum class Transform { clr, mclr, log };

struct TransformedTable {
  Eigen::MatrixXd values;
  Transform transform = Transform::clr;
  Labels samples;
  Labels taxa;
};

/// Delimited text with a header row; the leading column carries row labels.
/// Tab is the delimiter when the header line contains one, comma otherwise.
struct DelimitedMatrix {
  std::string corner;
  Labels row_labels;
  Labels col_labels;
  Eigen::MatrixXd values;
};

DelimitedMatrix read_delimited_matrix(const std::filesystem::path& path);

CountTable load_count_table(const std::filesystem::path& path,
                            Orientation orientation = Orientation::samples_in_rows);

/// Writes samples in rows, tab-delimited, full round-trip precision.
void write_count_table(const CountTable& table, const std::filesystem::path& path);

/// Keeps taxa with value > 0 in at least min_prevalence * n samples and a
/// column total of at least min_total. Throws FilterError when none survive.
CountTable filter_taxa(const CountTable& table, double min_prevalence, double min_total);

/// (x + pseudo) / row total. pseudo = 0 requires a zero-free table.
CompositionTable to_composition(const CountTable& table, double pseudo);

TransformedTable clr_transform(const CompositionTable& composition);

struct MclrShift {
  enum class Kind { automatic, fixed } kind = Kind::automatic;
  double value = 0.0;

  static MclrShift automatic() { return {}; }
  static MclrShift fixed(double v) { return {Kind::fixed, v}; }
};

/// Modified CLR: log-centres the nonzero entries of each row and shifts them
/// by a global constant; zeros remain exactly zero. With the automatic shift
/// the smallest transformed nonzero equals 1.
TransformedTable mclr_transform(const CountTable& table,
                                MclrShift shift = MclrShift::automatic());
/// mclr on a bare nonnegative matrix; `samples` only improves error messages.
Eigen::MatrixXd mclr_matrix(const Eigen::MatrixXd& values,
                            MclrShift shift = MclrShift::automatic(),
                            const Labels* samples = nullptr);

}  // namespace cminet
