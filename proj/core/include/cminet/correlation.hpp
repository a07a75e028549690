#pragma once

#include "cminet/table.hpp"

#include <Eigen/Core>

#include <string>

namespace cminet {

enum class CorrelationMethod { pearson, spearman, bicor, kendall };

std::string to_string(CorrelationMethod m);

/// Symmetric p x p association matrix with unit diagonal.
struct CorrelationMatrix {
  Eigen::MatrixXd values;
  std::string method;
  Labels taxa;
};

/// Biweight tuning constant: observations farther than 9 MADs from the
/// median receive zero weight.
inline constexpr double kBicorTuning = 9.0;

/// Pairwise correlation of the columns of `data` (rows are samples).
/// Requires n >= 4 and no constant column (EstimatorError names the taxon).
CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& data, CorrelationMethod method,
                                     const Labels& taxa);
CorrelationMatrix correlation_matrix(const TransformedTable& data, CorrelationMethod method);
CorrelationMatrix correlation_matrix(const CountTable& data, CorrelationMethod method);

/// Average ranks (1-based) with ties sharing their mean rank.
Eigen::VectorXd average_ranks(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Kendall tau-b between two equal-length vectors; NaN when either is constant.
double kendall_tau_b(const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& y);

/// Gaussian-copula bridge: latent correlation implied by Kendall's tau.
double kendall_bridge(double tau);

/// Eigenvalue clipping at `floor` followed by diagonal renormalisation.
/// Throws EstimatorError if the eigendecomposition fails.
Eigen::MatrixXd nearest_psd_correlation(const Eigen::MatrixXd& m, double floor = 1e-8);

/// Kendall tau-b of the mclr-transformed table mapped through the bridge and
/// projected to the nearest positive semidefinite correlation matrix.
CorrelationMatrix latent_correlation(const CountTable& table);
/// Same estimator applied to an already transformed data matrix. With
/// `lenient`, constant columns get zero correlation instead of an error.
Eigen::MatrixXd latent_correlation_values(const Eigen::MatrixXd& transformed,
                                          bool lenient = false);

}  // namespace cminet
