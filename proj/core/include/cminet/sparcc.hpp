#pragma once

#include "cminet/correlation.hpp"
#include "cminet/table.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

namespace cminet {

struct SparccParams {
  int imax = 20;       // Dirichlet resampling iterations, aggregated by median
  int kmax = 10;       // strongly-correlated-pair exclusion rounds
  double alpha = 0.1;  // exclusion threshold on |correlation|
  double vmin = 1e-4;  // basis-variance floor
  int workers = 1;
};

/// T[i][j] = variance over samples of ln(x_i / x_j); rows of `fractions` are
/// strictly positive compositions (or any positive abundances).
Eigen::MatrixXd log_ratio_variation(const Eigen::MatrixXd& fractions);

/// Basis correlations from one variation matrix, with iterative exclusion of
/// the strongest pair. `excluded` receives the (i, j) pairs in exclusion order.
/// Entries of components with too few remaining pairs are NaN.
Eigen::MatrixXd sparcc_basis_correlation(const Eigen::MatrixXd& variation,
                                         const SparccParams& params,
                                         std::vector<std::pair<Eigen::Index, Eigen::Index>>*
                                             excluded = nullptr);

/// Throws EstimatorError for p < 4, n < 4 or an all-zero taxon.
CorrelationMatrix sparcc_fit(const CountTable& table, const SparccParams& params,
                             std::uint64_t seed);

}  // namespace cminet
