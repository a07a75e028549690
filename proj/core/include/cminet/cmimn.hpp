#pragma once

#include "cminet/methods.hpp"
#include "cminet/table.hpp"

#include <Eigen/Core>

#include <vector>

namespace cminet {

struct CmimnParams {
  bool quantitative = true;  // CLR when true, mclr otherwise
  double q1 = 0.7;           // stage-1 MI quantile
  double q2 = 0.95;          // stage-2 CMI quantile

  /// Throws EstimatorError unless 0 < q1 <= q2 < 1.
  void validate() const;
  ParamRecord record() const;
};

/// Gaussian mutual information -0.5 ln(1 - r^2), |r| clipped to 1 - 1e-12.
double gaussian_mi(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);
double gaussian_mi_from_r(double r);

/// First-order Gaussian CMI from the partial correlation of x and y given z.
double conditional_mi(const Eigen::Ref<const Eigen::VectorXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& z);
/// Same, from the three pairwise correlations.
double conditional_mi_from_r(double rxy, double rxz, double ryz);

/// Linear-interpolation quantile (type 7). Throws on empty input.
double empirical_quantile(std::vector<double> values, double q);

struct CmimnStages {
  Eigen::MatrixXd mi;
  Eigen::MatrixXd min_cmi;  // NaN where the edge had no common neighbour
  Adjacency stage1;
  Adjacency stage2;
  double mi_cutoff = 0.0;
  double cmi_cutoff = 0.0;  // q2 quantile of the per-edge minima; NaN when none exist
};

/// Both stages on an already transformed matrix (samples in rows).
CmimnStages cmimn_stages(const Eigen::MatrixXd& transformed, double q1, double q2,
                         const Labels* taxa = nullptr);

MethodResult cmimn_fit(const CountTable& table, const CmimnParams& params);

}  // namespace cminet
