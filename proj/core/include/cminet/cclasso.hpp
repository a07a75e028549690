#pragma once

#include "cminet/correlation.hpp"
#include "cminet/methods.hpp"
#include "cminet/table.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

namespace cminet {

struct CclassoParams {
  bool counts = false;
  double pseudo = 0.5;
  int k_cv = 3;
  std::pair<double, double> lam_int{1e-4, 1.0};
  int k_max = 20;  // ADMM iterations per solve
  int n_boot = 20;

  ParamRecord record() const;
};

struct CclassoResult {
  CorrelationMatrix correlation;
  Eigen::MatrixXd pvalues;
  double selected_lambda = 0.0;
  std::vector<std::pair<double, double>> cv_trace;  // (lambda, cv loss) per evaluation
  bool converged = true;
  bool pseudo_applied = false;
};

/// Precomputed weights and eigenbases of the weighted compositional loss for
/// one set of log-compositions.
class CclassoProblem {
 public:
  /// `log_composition` holds ln of closed compositions, samples in rows.
  explicit CclassoProblem(const Eigen::MatrixXd& log_composition);

  /// Alternating-direction solve for one penalty. Returns the sparse split
  /// variable (off-diagonals soft-thresholded, diagonal unpenalised).
  /// `warm` seeds the iterate; `converged` receives the stopping status.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& sample_cov, double lambda,
                        const Eigen::MatrixXd& warm, bool* converged = nullptr,
                        int max_iter = 200, double tol = 1e-5) const;

  /// Weighted, double-centred squared distance between an estimate and a
  /// held-out covariance.
  double loss(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& held_out) const;

  const Eigen::MatrixXd& log_data() const { return x_; }

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd wd_;
  Eigen::VectorXd wd_sqrt_;
  Eigen::MatrixXd basis_;       // eigenvectors of the centring matrix, null vector last
  Eigen::MatrixXd inner_vecs_;  // eigenvectors of the weighted reduced block
  Eigen::MatrixXd inner_scale_;
};

/// Bootstrap sign-stability p-value: (1 + #replicates whose estimate has the
/// opposite sign of `estimate` or magnitude below 1e-6) / (n_boot + 1).
double sign_stability_pvalue(double estimate, const std::vector<double>& replicates);

/// Throws EstimatorError when a CV fold would hold fewer than 3 samples.
CclassoResult cclasso_fit(const CountTable& table, const CclassoParams& params,
                          std::uint64_t seed, int workers = 1);

}  // namespace cminet
