#include "cminet/sparse_graph.hpp"

#include "cminet/errors.hpp"
#include "cminet/parallel.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace cminet {

namespace {

double soft_threshold(double x, double lambda) {
  if (x > lambda) return x - lambda;
  if (x < -lambda) return x + lambda;
  return 0.0;
}

std::vector<Eigen::Index> all_but(Eigen::Index p, Eigen::Index skip) {
  std::vector<Eigen::Index> idx;
  idx.reserve(static_cast<std::size_t>(p - 1));
  for (Eigen::Index k = 0; k < p; ++k) {
    if (k != skip) idx.push_back(k);
  }
  return idx;
}

// log det of a symmetric matrix, NaN unless positive definite.
double log_det_pd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double off_diagonal_l1(const Eigen::MatrixXd& m) {
  return m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum();
}

constexpr double kInnerTol = 1e-10;
constexpr int kInnerSweeps = 10000;

}  // namespace

LambdaPath lambda_path(const Eigen::MatrixXd& s, int nlambda, double lambda_min_ratio) {
  if (nlambda < 1) throw PathError("nlambda must be positive");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0)) {
    throw PathError("lambda_min_ratio must lie in (0, 1)");
  }
  double lambda_max = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (i != j) lambda_max = std::max(lambda_max, std::abs(s(i, j)));
    }
  }
  if (lambda_max == 0.0) throw PathError("all off-diagonal entries are zero");
  LambdaPath path;
  path.nlambda = nlambda;
  path.lambda_min_ratio = lambda_min_ratio;
  path.values.resize(static_cast<std::size_t>(nlambda));
  path.values[0] = lambda_max;
  const double step = nlambda > 1 ? std::log(lambda_min_ratio) / (nlambda - 1) : 0.0;
  for (int k = 1; k < nlambda; ++k) path.values[k] = lambda_max * std::exp(step * k);
  if (nlambda > 1) path.values.back() = lambda_max * lambda_min_ratio;
  return path;
}

LassoStatus lasso_quadratic(const Eigen::MatrixXd& q, const Eigen::VectorXd& c, double lambda,
                            Eigen::VectorXd& beta, double tol, int max_sweeps) {
  Eigen::VectorXd fitted = q * beta;
  LassoStatus status;
  for (status.sweeps = 1; status.sweeps <= max_sweeps; ++status.sweeps) {
    double max_change = 0.0;
    for (Eigen::Index k = 0; k < beta.size(); ++k) {
      const double partial = c[k] - (fitted[k] - q(k, k) * beta[k]);
      const double updated = soft_threshold(partial, lambda) / q(k, k);
      const double delta = updated - beta[k];
      if (delta != 0.0) {
        fitted += q.col(k) * delta;
        beta[k] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < tol) {
      status.converged = true;
      return status;
    }
  }
  status.sweeps = max_sweeps;
  return status;
}

PrecisionEstimate graphical_lasso(const Eigen::MatrixXd& s, double lambda,
                                  GlassoOptions options) {
  if (s.rows() != s.cols()) throw SolverError("graphical lasso needs a square matrix");
  if (lambda < 0.0) throw SolverError("lambda must be nonnegative");
  const Eigen::Index p = s.rows();
  if ((s.diagonal().array() <= 0.0).any()) {
    throw SolverError("graphical lasso needs a positive diagonal");
  }

  Eigen::MatrixXd w = s;
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(p, p);  // column j: regression of j on others
  PrecisionEstimate est;
  est.lambda = lambda;

  std::vector<std::vector<Eigen::Index>> others(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) others[j] = all_but(p, j);

  for (est.iterations = 1; est.iterations <= options.max_iter; ++est.iterations) {
    const Eigen::MatrixXd previous = w;
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto& idx = others[j];
      const Eigen::MatrixXd w11 = w(idx, idx);
      const Eigen::VectorXd s12 = s(idx, j);
      Eigen::VectorXd b = beta(idx, j);
      lasso_quadratic(w11, s12, lambda, b, kInnerTol, kInnerSweeps);
      beta(idx, j) = b;
      const Eigen::VectorXd w12 = w11 * b;
      w(idx, j) = w12;
      w(j, idx) = w12.transpose();
    }
    est.dual_trace.push_back(log_det_pd(w));
    if ((w - previous).cwiseAbs().maxCoeff() < options.tol) {
      est.converged = true;
      break;
    }
  }
  est.iterations = std::min(est.iterations, options.max_iter);

  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& idx = others[j];
    const Eigen::VectorXd b = beta(idx, j);
    const double schur = w(j, j) - w(idx, j).dot(b);
    if (!(schur > 0.0)) {
      throw SolverError("non-positive-definite working covariance at column " +
                        std::to_string(j));
    }
    omega(j, j) = 1.0 / schur;
    omega(idx, j) = -b * omega(j, j);
  }
  est.omega = 0.5 * (omega + omega.transpose());
  est.covariance = std::move(w);
  const double ld = log_det_pd(est.omega);
  if (std::isnan(ld)) est.converged = false;
  est.objective =
      ld - (s.cwiseProduct(est.omega)).sum() - lambda * off_diagonal_l1(est.omega);
  return est;
}

std::vector<Adjacency> mb_path_from_correlation(const Eigen::MatrixXd& r,
                                                std::span<const double> lambdas,
                                                MbOptions options) {
  const Eigen::Index p = r.rows();
  std::vector<Eigen::MatrixXd> coef(lambdas.size(), Eigen::MatrixXd::Zero(p, p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto idx = all_but(p, j);
    const Eigen::MatrixXd q = r(idx, idx);
    const Eigen::VectorXd c = r(idx, j);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p - 1);
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      lasso_quadratic(q, c, lambdas[l], b, options.tol, options.max_sweeps);
      coef[l](idx, j) = b;  // column j holds the regression of node j
    }
  }
  std::vector<Adjacency> out;
  out.reserve(lambdas.size());
  for (const auto& b : coef) {
    Adjacency a = Adjacency::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = i + 1; j < p; ++j) {
        const bool ij = b(i, j) != 0.0;
        const bool ji = b(j, i) != 0.0;
        const bool edge = options.rule == CombineRule::or_rule ? (ij || ji) : (ij && ji);
        a(i, j) = a(j, i) = edge ? 1 : 0;
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

Eigen::MatrixXd lenient_pearson(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd z = x.rowwise() - x.colwise().mean();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double norm = z.col(j).norm();
    if (norm > 0.0) z.col(j) /= norm;
  }
  Eigen::MatrixXd r = z.transpose() * z;
  r = 0.5 * (r + r.transpose()).eval();
  r = r.cwiseMax(-1.0).cwiseMin(1.0);
  r.diagonal().setOnes();
  return r;
}

BinaryNetwork mb_neighborhood(const Eigen::MatrixXd& x, double lambda, const Labels& taxa,
                              MbOptions options) {
  if (x.rows() < 2) throw EstimatorError("neighbourhood selection needs at least 2 samples");
  const double l[] = {lambda};
  auto adj = mb_path_from_correlation(lenient_pearson(x), l, options);
  return BinaryNetwork(std::move(adj.front()), taxa, "mb");
}

double StarsParams::effective_ratio(Eigen::Index n) const {
  if (subsample_ratio) return *subsample_ratio;
  const double nn = static_cast<double>(n);
  return n > 144 ? 10.0 * std::sqrt(nn) / nn : 0.8;
}

double edge_instability(const Eigen::MatrixXd& frequency) {
  const Eigen::Index p = frequency.rows();
  if (p < 2) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double theta = frequency(i, j);
      total += 2.0 * theta * (1.0 - theta);
    }
  }
  return total / (0.5 * static_cast<double>(p) * static_cast<double>(p - 1));
}

StarsResult stars_select(const Eigen::MatrixXd& x, const PathFitter& fitter,
                         const LambdaPath& path, const StarsParams& params, const Labels& taxa,
                         const std::string& provenance) {
  if (path.values.empty()) throw SelectionError("empty lambda path");
  if (params.rep_num < 1) throw SelectionError("rep_num must be positive");
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const auto m = static_cast<Eigen::Index>(
      std::floor(params.effective_ratio(n) * static_cast<double>(n)));
  if (m < 2 || m > n) throw SelectionError("subsample size out of range");

  const std::size_t nl = path.values.size();
  std::vector<std::vector<Adjacency>> fits(static_cast<std::size_t>(params.rep_num));
  parallel_for(fits.size(), params.workers, [&](std::size_t rep) {
    std::mt19937_64 rng(derive_seed(params.seed, rep));
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(static_cast<std::size_t>(m));
    std::sort(rows.begin(), rows.end());
    const Eigen::MatrixXd sub = x(rows, Eigen::all);
    fits[rep] = fitter(sub, path.values);
    if (fits[rep].size() != nl) throw SelectionError("path fitter returned a wrong count");
  });

  StarsResult res;
  res.instability.resize(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(p, p);
    for (const auto& f : fits) freq += f[l].cast<double>();
    freq /= static_cast<double>(params.rep_num);
    res.instability[l] = edge_instability(freq);
  }
  res.monotone_instability.resize(nl);
  double running = 0.0;
  for (std::size_t l = 0; l < nl; ++l) {
    running = std::max(running, res.instability[l]);
    res.monotone_instability[l] = running;
  }

  std::optional<std::size_t> chosen;
  for (std::size_t l = 0; l < nl; ++l) {
    if (res.monotone_instability[l] <= params.beta_threshold) chosen = l;
  }
  if (!chosen) {
    res.flagged = true;
    chosen = static_cast<std::size_t>(
        std::min_element(res.monotone_instability.begin(), res.monotone_instability.end()) -
        res.monotone_instability.begin());
  }
  res.index = *chosen;
  res.lambda = path.values[res.index];
  const double selected[] = {res.lambda};
  auto full = fitter(x, selected);
  res.network = BinaryNetwork(std::move(full.front()), taxa, provenance);
  return res;
}

double ebic_score(double loglik, long edges, double n, Eigen::Index p, double gamma) {
  const double e = static_cast<double>(edges);
  return -2.0 * loglik + e * std::log(n) + 4.0 * e * gamma * std::log(static_cast<double>(p));
}

Adjacency support_of(const Eigen::MatrixXd& omega) {
  const Eigen::Index p = omega.rows();
  Adjacency a = Adjacency::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const bool edge = omega(i, j) != 0.0 || omega(j, i) != 0.0;
      a(i, j) = a(j, i) = edge ? 1 : 0;
    }
  }
  return a;
}

EbicResult ebic_select_fits(const std::vector<CriterionFit>& fits, double n,
                            const LambdaPath& path, double gamma, const Labels& taxa,
                            const std::string& provenance) {
  const std::size_t nl = path.values.size();
  if (nl == 0) throw SelectionError("empty lambda path");
  if (fits.size() != nl) throw SelectionError("one fit per lambda is required");
  const auto p = static_cast<Eigen::Index>(taxa.size());

  EbicResult res;
  res.scores.assign(nl, std::numeric_limits<double>::infinity());
  res.edges.assign(nl, 0);
  std::optional<std::size_t> best;
  for (std::size_t l = 0; l < nl; ++l) {
    if (!fits[l].converged || !std::isfinite(fits[l].loglik)) continue;
    res.edges[l] = support_of(fits[l].omega).sum() / 2;
    res.scores[l] = ebic_score(fits[l].loglik, res.edges[l], n, p, gamma);
    if (!best) {
      best = l;
      continue;
    }
    const double a = res.scores[l];
    const double b = res.scores[*best];
    // Path order is decreasing lambda, so an exact tie keeps the earlier
    // (larger) lambda unless this fit is strictly sparser.
    if (a < b || (a == b && res.edges[l] < res.edges[*best])) best = l;
  }
  if (!best) throw SelectionError("no converged fit along the lambda path");
  res.index = *best;
  res.lambda = path.values[res.index];
  res.omega = fits[res.index].omega;
  res.network = BinaryNetwork(support_of(res.omega), taxa, provenance);
  return res;
}

EbicResult ebic_select_with(const std::function<CriterionFit(double)>& fit, double n,
                            const LambdaPath& path, double gamma, const Labels& taxa,
                            const std::string& provenance, int workers) {
  std::vector<CriterionFit> fits(path.values.size());
  parallel_for(fits.size(), workers, [&](std::size_t l) {
    try {
      fits[l] = fit(path.values[l]);
    } catch (const SolverError&) {
      fits[l].converged = false;
    }
  });
  return ebic_select_fits(fits, n, path, gamma, taxa, provenance);
}

EbicResult ebic_select(const Eigen::MatrixXd& s, double n, const LambdaPath& path, double gamma,
                       const Labels& taxa, const std::string& provenance, int workers) {
  auto fit = [&](double lambda) {
    auto est = graphical_lasso(s, lambda);
    CriterionFit out;
    const double ld = log_det_pd(est.omega);
    out.loglik = 0.5 * n * (ld - s.cwiseProduct(est.omega).sum());
    out.converged = est.converged;
    out.omega = std::move(est.omega);
    return out;
  };
  return ebic_select_with(fit, n, path, gamma, taxa, provenance, workers);
}

}  // namespace cminet
