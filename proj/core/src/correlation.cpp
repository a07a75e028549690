#include "cminet/correlation.hpp"

#include "cminet/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

namespace cminet {

namespace {

double median_of(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

void require_usable(const Eigen::MatrixXd& data, const Labels& taxa) {
  if (data.rows() < 4) throw EstimatorError("correlation requires at least 4 samples");
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    if (data.col(j).maxCoeff() == data.col(j).minCoeff()) {
      const std::string name =
          j < static_cast<Eigen::Index>(taxa.size()) ? taxa[j] : std::to_string(j);
      throw EstimatorError("constant column for taxon '" + name + "'");
    }
  }
}

// Columns scaled to unit Euclidean norm after centring at the mean.
Eigen::MatrixXd unit_pearson_columns(const Eigen::MatrixXd& data) {
  Eigen::MatrixXd z = data.rowwise() - data.colwise().mean();
  for (Eigen::Index j = 0; j < z.cols(); ++j) z.col(j) /= z.col(j).norm();
  return z;
}

Eigen::MatrixXd unit_biweight_columns(const Eigen::MatrixXd& data) {
  Eigen::MatrixXd z(data.rows(), data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    std::vector<double> col(data.col(j).begin(), data.col(j).end());
    const double med = median_of(col);
    for (auto& c : col) c = std::abs(c - med);
    const double mad = median_of(col);
    if (mad == 0.0) {
      Eigen::VectorXd c = data.col(j).array() - data.col(j).mean();
      z.col(j) = c / c.norm();
      continue;
    }
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      const double dev = data(i, j) - med;
      const double u = dev / (kBicorTuning * mad);
      const double w = std::abs(u) < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
      z(i, j) = dev * w;
    }
    z.col(j) /= z.col(j).norm();
  }
  return z;
}

Eigen::MatrixXd finish(Eigen::MatrixXd r) {
  r = 0.5 * (r + r.transpose()).eval();
  r = r.cwiseMax(-1.0).cwiseMin(1.0);
  r.diagonal().setOnes();
  return r;
}

}  // namespace

std::string to_string(CorrelationMethod m) {
  switch (m) {
    case CorrelationMethod::pearson: return "pearson";
    case CorrelationMethod::spearman: return "spearman";
    case CorrelationMethod::bicor: return "bicor";
    case CorrelationMethod::kendall: return "kendall";
  }
  return "unknown";
}

Eigen::VectorXd average_ranks(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto n = static_cast<std::size_t>(x.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  Eigen::VectorXd ranks(x.size());
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double kendall_tau_b(const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y) {
  const Eigen::Index n = x.size();
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0) ++ties_x;
      if (dy == 0.0) ++ties_y;
      if (dx == 0.0 || dy == 0.0) continue;
      if ((dx > 0.0) == (dy > 0.0)) ++concordant; else ++discordant;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  const double denom = std::sqrt((pairs - ties_x) * (pairs - ties_y));
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(concordant - discordant) / denom;
}

double kendall_bridge(double tau) { return std::sin(0.5 * std::numbers::pi * tau); }

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& data, CorrelationMethod method,
                                     const Labels& taxa) {
  require_usable(data, taxa);
  Eigen::MatrixXd r;
  switch (method) {
    case CorrelationMethod::pearson: {
      const Eigen::MatrixXd z = unit_pearson_columns(data);
      r = z.transpose() * z;
      break;
    }
    case CorrelationMethod::spearman: {
      Eigen::MatrixXd ranks(data.rows(), data.cols());
      for (Eigen::Index j = 0; j < data.cols(); ++j) ranks.col(j) = average_ranks(data.col(j));
      const Eigen::MatrixXd z = unit_pearson_columns(ranks);
      r = z.transpose() * z;
      break;
    }
    case CorrelationMethod::bicor: {
      const Eigen::MatrixXd z = unit_biweight_columns(data);
      r = z.transpose() * z;
      break;
    }
    case CorrelationMethod::kendall: {
      const auto p = data.cols();
      r = Eigen::MatrixXd::Identity(p, p);
      for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) {
          r(i, j) = r(j, i) = kendall_tau_b(data.col(i), data.col(j));
        }
      }
      break;
    }
  }
  return {finish(std::move(r)), to_string(method), taxa};
}

CorrelationMatrix correlation_matrix(const TransformedTable& data, CorrelationMethod method) {
  return correlation_matrix(data.values, method, data.taxa);
}

CorrelationMatrix correlation_matrix(const CountTable& data, CorrelationMethod method) {
  return correlation_matrix(data.values(), method, data.taxa());
}

Eigen::MatrixXd nearest_psd_correlation(const Eigen::MatrixXd& m, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) {
    throw EstimatorError("eigendecomposition did not converge during PSD projection");
  }
  if (eig.eigenvalues().minCoeff() >= floor) return m;
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(floor);
  Eigen::MatrixXd a = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::VectorXd inv_sd = a.diagonal().cwiseSqrt().cwiseInverse();
  a = inv_sd.asDiagonal() * a * inv_sd.asDiagonal();
  a = 0.5 * (a + a.transpose()).eval();
  a.diagonal().setOnes();
  return a;
}

Eigen::MatrixXd latent_correlation_values(const Eigen::MatrixXd& transformed, bool lenient) {
  if (transformed.rows() < 4) throw EstimatorError("latent correlation requires n >= 4");
  const auto p = transformed.cols();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!lenient && transformed.col(j).maxCoeff() == transformed.col(j).minCoeff()) {
      throw EstimatorError("constant column " + std::to_string(j) + " in latent correlation");
    }
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double tau = kendall_tau_b(transformed.col(i), transformed.col(j));
      r(i, j) = r(j, i) = std::isnan(tau) ? 0.0 : kendall_bridge(tau);
    }
  }
  return nearest_psd_correlation(r);
}

CorrelationMatrix latent_correlation(const CountTable& table) {
  const auto mclr = mclr_transform(table);
  return {latent_correlation_values(mclr.values), "latent_kendall", table.taxa()};
}

}  // namespace cminet
