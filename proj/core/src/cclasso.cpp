#include "cminet/cclasso.hpp"

#include "cminet/errors.hpp"
#include "cminet/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cminet {

namespace {

constexpr double kZeroTol = 1e-6;
constexpr int kMaxEvaluations = 20;  // golden-section CV evaluations

Eigen::MatrixXd covariance_of(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

Eigen::MatrixXd double_centred(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd row_mean = m.rowwise().mean();
  Eigen::MatrixXd out = m;
  out.colwise() -= row_mean;
  out.rowwise() -= row_mean.transpose();
  out.array() += row_mean.mean();
  return out;
}

Eigen::MatrixXd soft_off_diagonal(const Eigen::MatrixXd& a, double lambda) {
  Eigen::MatrixXd out = a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i == j) continue;
      const double v = a(i, j);
      out(i, j) = v > lambda ? v - lambda : (v < -lambda ? v + lambda : 0.0);
    }
  }
  return out;
}

Eigen::MatrixXd to_correlation(const Eigen::MatrixXd& sigma) {
  if ((sigma.diagonal().array() <= 0.0).any()) {
    throw EstimatorError("CCLasso covariance estimate has a non-positive variance");
  }
  const Eigen::VectorXd inv_sd = sigma.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd r = inv_sd.asDiagonal() * sigma * inv_sd.asDiagonal();
  r = 0.5 * (r + r.transpose()).eval();
  r = r.cwiseMax(-1.0).cwiseMin(1.0);
  r.diagonal().setOnes();
  return r;
}

}  // namespace

ParamRecord CclassoParams::record() const {
  return {
      {"counts", counts},
      {"pseudo", pseudo},
      {"k_cv", static_cast<long long>(k_cv)},
      {"lam_int", std::vector<double>{lam_int.first, lam_int.second}},
      {"k_max", static_cast<long long>(k_max)},
      {"n_boot", static_cast<long long>(n_boot)},
  };
}

CclassoProblem::CclassoProblem(const Eigen::MatrixXd& log_composition) : x_(log_composition) {
  const Eigen::Index p = x_.cols();
  const Eigen::MatrixXd clr_cov = double_centred(covariance_of(x_));
  wd_ = clr_cov.diagonal().cwiseInverse();
  wd_sqrt_ = wd_.cwiseSqrt();

  const Eigen::MatrixXd centring =
      Eigen::MatrixXd::Identity(p, p) - Eigen::MatrixXd::Constant(p, p, 1.0 / p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centring);
  // Ascending order puts the null vector (proportional to 1) first; move it last.
  basis_.resize(p, p);
  basis_.leftCols(p - 1) = eig.eigenvectors().rightCols(p - 1);
  basis_.col(p - 1) = eig.eigenvectors().col(0);

  const Eigen::MatrixXd weighted =
      (basis_.transpose() * wd_.asDiagonal() * basis_).topLeftCorner(p - 1, p - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> inner(weighted);
  inner_vecs_ = inner.eigenvectors();
  const Eigen::VectorXd v = inner.eigenvalues();
  inner_scale_.resize(p - 1, p - 1);
  for (Eigen::Index i = 0; i < p - 1; ++i) {
    for (Eigen::Index j = 0; j < p - 1; ++j) inner_scale_(i, j) = 1.0 / (0.5 * (v[i] + v[j]) + 1.0);
  }
}

Eigen::MatrixXd CclassoProblem::solve(const Eigen::MatrixXd& sample_cov, double lambda,
                                      const Eigen::MatrixXd& warm, bool* converged,
                                      int max_iter, double tol) const {
  const Eigen::Index p = sample_cov.rows();
  Eigen::MatrixXd sigma = warm;
  Eigen::MatrixXd split = warm;
  Eigen::MatrixXd dual = Eigen::MatrixXd::Zero(p, p);
  bool done = false;
  for (int it = 0; it < max_iter && !done; ++it) {
    Eigen::MatrixXd xs = basis_.transpose() * ((split - sample_cov) - dual) * basis_;
    const Eigen::MatrixXd block = xs.topLeftCorner(p - 1, p - 1);
    xs.topLeftCorner(p - 1, p - 1) =
        inner_vecs_ *
        (inner_vecs_.transpose() * block * inner_vecs_).cwiseProduct(inner_scale_) *
        inner_vecs_.transpose();
    Eigen::MatrixXd sigma_new = sample_cov + basis_ * xs * basis_.transpose();
    sigma_new = 0.5 * (sigma_new + sigma_new.transpose()).eval();
    Eigen::MatrixXd split_new = soft_off_diagonal(dual + sigma_new, lambda);
    dual += sigma_new - split_new;

    const double err = std::max(
        ((sigma_new - sigma).cwiseAbs().array() / (sigma.cwiseAbs().array() + 1.0)).maxCoeff(),
        ((split_new - split).cwiseAbs().array() / (split.cwiseAbs().array() + 1.0)).maxCoeff());
    sigma = std::move(sigma_new);
    split = std::move(split_new);
    done = err <= tol;
  }
  if (converged) *converged = done;
  return split;
}

double CclassoProblem::loss(const Eigen::MatrixXd& estimate,
                            const Eigen::MatrixXd& held_out) const {
  const Eigen::MatrixXd d = double_centred(estimate - held_out);
  return (wd_sqrt_.asDiagonal() * d).squaredNorm();
}

double sign_stability_pvalue(double estimate, const std::vector<double>& replicates) {
  if (std::abs(estimate) < kZeroTol) return 1.0;
  const auto unstable = std::count_if(replicates.begin(), replicates.end(), [&](double r) {
    return std::abs(r) < kZeroTol || (r > 0.0) != (estimate > 0.0);
  });
  const double p = (1.0 + static_cast<double>(unstable)) /
                   (static_cast<double>(replicates.size()) + 1.0);
  return std::min(p, 1.0);
}

CclassoResult cclasso_fit(const CountTable& table, const CclassoParams& params,
                          std::uint64_t seed, int workers) {
  const Eigen::Index n = table.n_samples();
  const Eigen::Index p = table.n_taxa();
  if (params.k_cv < 2) throw EstimatorError("k_cv must be at least 2");
  if (n < params.k_cv) throw EstimatorError("fewer samples than CV folds");
  const Eigen::Index fold = n / params.k_cv;
  if (fold < 3) throw EstimatorError("CV fold holds fewer than 3 samples");
  if (p < 3) throw EstimatorError("CCLasso requires at least 3 taxa");
  if (params.k_max < 1 || params.n_boot < 1) {
    throw EstimatorError("k_max and n_boot must be positive");
  }
  if (!(params.lam_int.first > 0.0 && params.lam_int.second > params.lam_int.first)) {
    throw EstimatorError("lam_int must be an increasing interval of positive reals");
  }

  CclassoResult result;
  const auto comp = compositional_input(table, params.counts, params.pseudo,
                                        &result.pseudo_applied);
  const CclassoProblem problem(comp.values.array().log().matrix());
  const Eigen::MatrixXd& x = problem.log_data();
  const Eigen::MatrixXd full_cov = covariance_of(x);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 fold_rng(derive_seed(seed, 0));
  std::shuffle(order.begin(), order.end(), fold_rng);

  Eigen::MatrixXd state = full_cov;
  auto cv_loss = [&](double log_lambda) {
    const double lambda = std::pow(10.0, log_lambda);
    double total = 0.0;
    for (int k = 0; k < params.k_cv; ++k) {
      std::vector<Eigen::Index> test, train;
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool in_test = i >= fold * k && i < fold * (k + 1);
        (in_test ? test : train).push_back(order[static_cast<std::size_t>(i)]);
      }
      const Eigen::MatrixXd test_cov = covariance_of(x(test, Eigen::all));
      const Eigen::MatrixXd train_cov = covariance_of(x(train, Eigen::all));
      state = problem.solve(train_cov, lambda, state, nullptr, params.k_max);
      total += problem.loss(state, test_cov);
    }
    result.cv_trace.emplace_back(lambda, total);
    return total;
  };

  // Golden-section search on log10(lambda).
  double a1 = std::log10(params.lam_int.first);
  double b1 = std::log10(params.lam_int.second);
  const double width_tol = 0.1 * std::max({1.0, a1, b1});
  double a2 = a1 + 0.382 * (b1 - a1);
  double b2 = a1 + 0.618 * (b1 - a1);
  double fb2 = cv_loss(b2);
  double fa2 = cv_loss(a2);
  int evaluations = 2;
  while (b1 - a1 > width_tol && evaluations < kMaxEvaluations) {
    const double fmax = std::max(fa2, fb2);
    if (fa2 > fb2) {
      a1 = a2;
      a2 = b2;
      fa2 = fb2;
      b2 = a1 + 0.618 * (b1 - a1);
      fb2 = cv_loss(b2);
    } else {
      b1 = b2;
      b2 = a2;
      fb2 = fa2;
      a2 = a1 + 0.382 * (b1 - a1);
      fa2 = cv_loss(a2);
    }
    ++evaluations;
    const double fmin = std::min(fa2, fb2);
    if (std::abs(fmax - fmin) / (1.0 + fmin) <= 1e-4) break;
  }
  const double lambda = std::pow(10.0, 0.5 * (a2 + b2));
  result.selected_lambda = lambda;

  bool converged = false;
  const Eigen::MatrixXd sigma = problem.solve(full_cov, lambda, state, &converged, params.k_max);
  result.converged = converged;
  const Eigen::MatrixXd raw_corr = to_correlation(sigma);

  std::vector<Eigen::MatrixXd> boot(static_cast<std::size_t>(params.n_boot));
  parallel_for(boot.size(), workers, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, 1 + b));
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    for (auto& r : rows) r = pick(rng);
    const Eigen::MatrixXd cov = covariance_of(x(rows, Eigen::all));
    boot[b] = to_correlation(problem.solve(cov, lambda, sigma, nullptr, params.k_max));
  });

  result.pvalues = Eigen::MatrixXd::Zero(p, p);
  std::vector<double> reps(boot.size());
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      for (std::size_t b = 0; b < boot.size(); ++b) reps[b] = boot[b](i, j);
      result.pvalues(i, j) = result.pvalues(j, i) = sign_stability_pvalue(raw_corr(i, j), reps);
    }
  }
  result.correlation = {nearest_psd_correlation(raw_corr, 0.0), "cclasso", table.taxa()};
  return result;
}

}  // namespace cminet
