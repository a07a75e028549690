#pragma once

#include "cminet/network.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cminet {

/// Strictly decreasing, log-equispaced penalty sequence anchored at the
/// largest off-diagonal magnitude of the input matrix.
struct LambdaPath {
  std::vector<double> values;
  double lambda_min_ratio = 1e-2;
  int nlambda = 15;
};

/// Throws PathError when every off-diagonal entry is zero.
LambdaPath lambda_path(const Eigen::MatrixXd& s, int nlambda, double lambda_min_ratio);

struct PrecisionEstimate {
  Eigen::MatrixXd omega;
  Eigen::MatrixXd covariance;  // working covariance W at termination
  double lambda = 0.0;
  double objective = 0.0;      // log det(omega) - tr(S omega) - lambda * sum_{i!=j} |omega_ij|
  std::vector<double> dual_trace;  // log det(W) after every sweep
  int iterations = 0;
  bool converged = false;
};

struct GlassoOptions {
  double tol = 1e-4;
  int max_iter = 200;
};

/// Graphical lasso by blockwise coordinate descent on the working covariance,
/// diagonal unpenalised. Throws SolverError when a column update yields a
/// non-positive Schur complement.
PrecisionEstimate graphical_lasso(const Eigen::MatrixXd& s, double lambda,
                                  GlassoOptions options = {});

struct LassoStatus {
  int sweeps = 0;
  bool converged = false;
};

/// Coordinate descent for  min_b  0.5 b'Qb - c'b + lambda |b|_1  (Q with
/// positive diagonal). `beta` is the warm start and receives the solution.
/// Converged when the largest coordinate change in a sweep is below tol.
LassoStatus lasso_quadratic(const Eigen::MatrixXd& q, const Eigen::VectorXd& c, double lambda,
                    Eigen::VectorXd& beta, double tol, int max_sweeps);

enum class CombineRule { or_rule, and_rule };

struct MbOptions {
  CombineRule rule = CombineRule::or_rule;
  double tol = 1e-6;
  int max_sweeps = 1000;
};

/// Meinshausen-Buhlmann neighbourhood selection driven by a correlation
/// matrix (the Gram matrix of standardised data). One adjacency per lambda,
/// warm-started along the given order.
std::vector<Adjacency> mb_path_from_correlation(const Eigen::MatrixXd& r,
                                                std::span<const double> lambdas,
                                                MbOptions options = {});

/// Neighbourhood selection on an n x p data matrix; columns are standardised.
BinaryNetwork mb_neighborhood(const Eigen::MatrixXd& x, double lambda, const Labels& taxa,
                              MbOptions options = {});

/// Pearson correlation in which constant columns are uncorrelated with
/// everything else (used on subsamples where a sparse taxon may vanish).
Eigen::MatrixXd lenient_pearson(const Eigen::MatrixXd& x);

struct StarsParams {
  int rep_num = 20;
  std::optional<double> subsample_ratio;  // unset: 10*sqrt(n)/n if n > 144 else 0.8
  double beta_threshold = 0.1;
  std::uint64_t seed = 42;
  int workers = 1;

  double effective_ratio(Eigen::Index n) const;
};

/// Fits one adjacency per penalty on the given sample rows.
using PathFitter =
    std::function<std::vector<Adjacency>(const Eigen::MatrixXd& rows, std::span<const double>)>;

struct StarsResult {
  BinaryNetwork network;
  double lambda = 0.0;
  std::size_t index = 0;
  std::vector<double> instability;            // D(lambda) along the path
  std::vector<double> monotone_instability;   // running max from the sparse end
  bool flagged = false;  // no lambda met the threshold; the least unstable prefix is used
};

/// Mean over node pairs of 2 theta (1 - theta) for the given selection
/// frequencies (upper triangle of `frequency`).
double edge_instability(const Eigen::MatrixXd& frequency);

StarsResult stars_select(const Eigen::MatrixXd& x, const PathFitter& fitter,
                         const LambdaPath& path, const StarsParams& params, const Labels& taxa,
                         const std::string& provenance);

/// One penalised fit evaluated by an information criterion.
struct CriterionFit {
  Eigen::MatrixXd omega;
  double loglik = 0.0;
  bool converged = false;
};

struct EbicResult {
  BinaryNetwork network;
  double lambda = 0.0;
  std::size_t index = 0;
  std::vector<double> scores;   // +inf where the fit was unusable
  std::vector<long> edges;
  Eigen::MatrixXd omega;
};

/// -2 loglik + E ln n + 4 E gamma ln p.
double ebic_score(double loglik, long edges, double n, Eigen::Index p, double gamma);

/// Off-diagonal nonzero pattern of a precision matrix.
Adjacency support_of(const Eigen::MatrixXd& omega);

/// EBIC minimiser over precomputed fits, one per path entry; unconverged or
/// non-finite fits are skipped. Ties go to the sparser model, then to the
/// larger lambda. Throws SelectionError when no fit is usable.
EbicResult ebic_select_fits(const std::vector<CriterionFit>& fits, double n,
                            const LambdaPath& path, double gamma, const Labels& taxa,
                            const std::string& provenance);

/// EBIC minimiser over a path of user-supplied fits; ties go to the sparser
/// model, then to the larger lambda. Throws SelectionError when no fit
/// converged.
EbicResult ebic_select_with(const std::function<CriterionFit(double)>& fit, double n,
                            const LambdaPath& path, double gamma, const Labels& taxa,
                            const std::string& provenance, int workers = 1);

/// Graphical-lasso EBIC with loglik = (n/2)(log det omega - tr(S omega)).
EbicResult ebic_select(const Eigen::MatrixXd& s, double n, const LambdaPath& path, double gamma,
                       const Labels& taxa, const std::string& provenance, int workers = 1);

}  // namespace cminet
