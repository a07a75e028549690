#include "cminet/cmimn.hpp"

#include "cminet/correlation.hpp"
#include "cminet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cminet {

namespace {

constexpr double kClip = 1.0 - 1e-12;

double pearson(const Eigen::Ref<const Eigen::VectorXd>& x,
               const Eigen::Ref<const Eigen::VectorXd>& y) {
  const Eigen::ArrayXd a = x.array() - x.mean();
  const Eigen::ArrayXd b = y.array() - y.mean();
  const double sa = a.matrix().squaredNorm();
  const double sb = b.matrix().squaredNorm();
  if (sa <= 0.0 || sb <= 0.0) throw EstimatorError("mutual information of a constant vector");
  return (a * b).sum() / std::sqrt(sa * sb);
}

void check_lengths(Eigen::Index a, Eigen::Index b, Eigen::Index minimum) {
  if (a != b) throw EstimatorError("vectors differ in length");
  if (a < minimum) {
    throw EstimatorError("at least " + std::to_string(minimum) + " observations required");
  }
}

}  // namespace

void CmimnParams::validate() const {
  if (!(q1 > 0.0 && q1 <= q2 && q2 < 1.0)) {
    throw EstimatorError("CMIMN quantiles must satisfy 0 < q1 <= q2 < 1");
  }
}

ParamRecord CmimnParams::record() const {
  return {{"quantitative", quantitative}, {"q1", q1}, {"q2", q2}};
}

double gaussian_mi_from_r(double r) {
  const double c = std::clamp(r, -kClip, kClip);
  return std::max(0.0, -0.5 * std::log1p(-c * c));
}

double gaussian_mi(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
  check_lengths(x.size(), y.size(), 4);
  return gaussian_mi_from_r(pearson(x, y));
}

double conditional_mi_from_r(double rxy, double rxz, double ryz) {
  const double denom = (1.0 - rxz * rxz) * (1.0 - ryz * ryz);
  if (!(denom > 1e-14)) throw EstimatorError("singular correlation matrix in CMI");
  return gaussian_mi_from_r((rxy - rxz * ryz) / std::sqrt(denom));
}

double conditional_mi(const Eigen::Ref<const Eigen::VectorXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& z) {
  check_lengths(x.size(), y.size(), 5);
  check_lengths(x.size(), z.size(), 5);
  return conditional_mi_from_r(pearson(x, y), pearson(x, z), pearson(y, z));
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw EstimatorError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

CmimnStages cmimn_stages(const Eigen::MatrixXd& transformed, double q1, double q2,
                         const Labels* taxa) {
  const Eigen::Index p = transformed.cols();
  if (p < 3) throw EstimatorError("CMIMN requires at least 3 taxa");
  if (transformed.rows() < 5) throw EstimatorError("CMIMN requires at least 5 samples");
  const Eigen::MatrixXd r =
      correlation_matrix(transformed, CorrelationMethod::pearson,
                         taxa ? *taxa : Labels(static_cast<std::size_t>(p)))
          .values;

  CmimnStages out;
  out.mi = Eigen::MatrixXd::Zero(p, p);
  std::vector<double> population;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      out.mi(i, j) = out.mi(j, i) = gaussian_mi_from_r(r(i, j));
      population.push_back(out.mi(i, j));
    }
  }
  out.mi_cutoff = empirical_quantile(population, q1);
  out.stage1 = Adjacency::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (out.mi(i, j) >= out.mi_cutoff) out.stage1(i, j) = out.stage1(j, i) = 1;
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.min_cmi = Eigen::MatrixXd::Constant(p, p, nan);
  std::vector<double> cmis;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (!out.stage1(i, j)) continue;
      for (Eigen::Index z = 0; z < p; ++z) {
        if (z == i || z == j || !out.stage1(i, z) || !out.stage1(j, z)) continue;
        const double c = conditional_mi_from_r(r(i, j), r(i, z), r(j, z));
        if (std::isnan(out.min_cmi(i, j)) || c < out.min_cmi(i, j)) {
          out.min_cmi(i, j) = out.min_cmi(j, i) = c;
        }
      }
      if (!std::isnan(out.min_cmi(i, j))) cmis.push_back(out.min_cmi(i, j));
    }
  }

  out.stage2 = out.stage1;
  out.cmi_cutoff = cmis.empty() ? nan : empirical_quantile(cmis, q2);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (out.stage1(i, j) && !std::isnan(out.min_cmi(i, j)) &&
          out.min_cmi(i, j) < out.cmi_cutoff) {
        out.stage2(i, j) = out.stage2(j, i) = 0;
      }
    }
  }
  return out;
}

MethodResult cmimn_fit(const CountTable& table, const CmimnParams& params) {
  params.validate();
  const TransformedTable data = params.quantitative
                                    ? clr_transform(to_composition(table, 0.5))
                                    : mclr_transform(table);
  auto stages = cmimn_stages(data.values, params.q1, params.q2, &table.taxa());

  MethodResult out;
  out.method = Method::cmimn;
  out.params = params.record();
  out.taxa = table.taxa();
  out.weights = stages.mi;
  out.network = BinaryNetwork(std::move(stages.stage2), table.taxa(), "cmimn");
  return out;
}

}  // namespace cminet
