#include "cminet/methods.hpp"

#include "cminet/correlation.hpp"
#include "cminet/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace cminet {

namespace {

constexpr std::array<std::string_view, 10> kMethodNames = {
    "pearson",      "spearman",         "bicor",  "sparcc", "spieceasi_mb",
    "spieceasi_glasso", "spring",       "gcoda",  "cmimn",  "cclasso",
};

double log_det_or_nan(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
  return centred.transpose() * centred / static_cast<double>(x.rows() - 1);
}

SelectionInfo from_stars(const StarsResult& stars, const LambdaPath& path) {
  SelectionInfo info;
  info.lambda = stars.lambda;
  info.lambda_path = path.values;
  info.stability = stars.instability;
  info.flagged = stars.flagged;
  if (stars.flagged) info.notes.emplace_back("no lambda met the StARS threshold");
  return info;
}

}  // namespace

std::string_view to_string(Method m) { return kMethodNames[static_cast<std::size_t>(m)]; }

std::optional<Method> method_from_string(std::string_view name) {
  for (auto m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool emits_network(Method m) {
  switch (m) {
    case Method::spieceasi_mb:
    case Method::spieceasi_glasso:
    case Method::spring:
    case Method::gcoda:
    case Method::cmimn:
      return true;
    default:
      return false;
  }
}

SpiecEasiParams SpiecEasiParams::defaults(SpiecEasiMode mode) {
  SpiecEasiParams p;
  p.mode = mode;
  if (mode == SpiecEasiMode::glasso) {
    p.rep_num = 50;
    p.ncores = 1;
  }
  return p;
}

ParamRecord SpiecEasiParams::record() const {
  return {
      {"method", std::string(mode == SpiecEasiMode::mb ? "mb" : "glasso")},
      {"lambda.min.ratio", lambda_min_ratio},
      {"nlambda", static_cast<long long>(nlambda)},
      {"rep.num", static_cast<long long>(rep_num)},
      {"ncores", static_cast<long long>(ncores)},
      {"pseudo", pseudo},
      {"stars.threshold", stars_threshold},
  };
}

ParamRecord SpringParams::record() const {
  return {
      {"Rmethod", rmethod},
      {"quantitative", quantitative},
      {"ncores", static_cast<long long>(ncores)},
      {"lambdaseq", lambdaseq},
      {"nlambda", static_cast<long long>(nlambda)},
      {"rep.num", static_cast<long long>(rep_num)},
      {"lambda.min.ratio", lambda_min_ratio},
      {"stars.threshold", stars_threshold},
  };
}

ParamRecord GcodaParams::record() const {
  return {
      {"counts", counts},
      {"pseudo", pseudo},
      {"lambda.min.ratio", lambda_min_ratio},
      {"nlambda", static_cast<long long>(nlambda)},
      {"ebic.gamma", ebic_gamma},
  };
}

CompositionTable compositional_input(const CountTable& table, bool counts, double pseudo,
                                     bool* pseudo_applied) {
  const bool has_zero = (table.values().array() <= 0.0).any();
  const bool apply = counts || has_zero;
  if (pseudo_applied) *pseudo_applied = apply;
  return to_composition(table, apply ? pseudo : 0.0);
}

MethodResult spieceasi_fit(const CountTable& table, const SpiecEasiParams& params,
                           std::uint64_t seed, int workers) {
  const auto clr = clr_transform(to_composition(table, params.pseudo));
  const auto full = correlation_matrix(clr, CorrelationMethod::pearson);
  const auto path = lambda_path(full.values, params.nlambda, params.lambda_min_ratio);

  PathFitter fitter;
  if (params.mode == SpiecEasiMode::mb) {
    fitter = [](const Eigen::MatrixXd& rows, std::span<const double> lambdas) {
      return mb_path_from_correlation(lenient_pearson(rows), lambdas);
    };
  } else {
    fitter = [](const Eigen::MatrixXd& rows, std::span<const double> lambdas) {
      const Eigen::MatrixXd r = lenient_pearson(rows);
      std::vector<Adjacency> out;
      out.reserve(lambdas.size());
      for (double lambda : lambdas) out.push_back(support_of(graphical_lasso(r, lambda).omega));
      return out;
    };
  }

  StarsParams stars;
  stars.rep_num = params.rep_num;
  stars.beta_threshold = params.stars_threshold;
  stars.seed = seed;
  stars.workers = workers;
  const std::string name(to_string(params.mode == SpiecEasiMode::mb ? Method::spieceasi_mb
                                                                     : Method::spieceasi_glasso));
  auto selected = stars_select(clr.values, fitter, path, stars, table.taxa(), name);

  MethodResult out;
  out.method = params.mode == SpiecEasiMode::mb ? Method::spieceasi_mb : Method::spieceasi_glasso;
  out.params = params.record();
  out.taxa = table.taxa();
  out.selection = from_stars(selected, path);
  out.network = std::move(selected.network);
  return out;
}

MethodResult spring_fit(const CountTable& table, const SpringParams& params,
                        std::uint64_t seed, int workers) {
  const auto full = latent_correlation(table);
  const auto path = lambda_path(full.values, params.nlambda, params.lambda_min_ratio);

  // Subsample rows are raw abundances; the transform runs per subsample.
  PathFitter fitter = [](const Eigen::MatrixXd& rows, std::span<const double> lambdas) {
    return mb_path_from_correlation(latent_correlation_values(mclr_matrix(rows), true), lambdas);
  };
  StarsParams stars;
  stars.rep_num = params.rep_num;
  stars.beta_threshold = params.stars_threshold;
  stars.seed = seed;
  stars.workers = workers;
  auto selected = stars_select(table.values(), fitter, path, stars, table.taxa(), "spring");

  MethodResult out;
  out.method = Method::spring;
  out.params = params.record();
  out.taxa = table.taxa();
  out.selection = from_stars(selected, path);
  out.network = std::move(selected.network);
  return out;
}

double gcoda_negative_loglik(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& s) {
  const Eigen::VectorXd u = omega.rowwise().sum();
  const double c = u.sum();
  const double ld = log_det_or_nan(omega);
  if (std::isnan(ld) || !(c > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return -ld + omega.cwiseProduct(s).sum() + std::log(c) - u.dot(s * u) / c;
}

PrecisionEstimate gcoda_solve(const Eigen::MatrixXd& s, double lambda,
                              const Eigen::MatrixXd* warm_start, int max_steps, double tol) {
  const Eigen::Index p = s.rows();
  Eigen::MatrixXd omega = warm_start ? *warm_start : Eigen::MatrixXd::Identity(p, p);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p);
  auto penalised = [&](const Eigen::MatrixXd& o) {
    return gcoda_negative_loglik(o, s) + lambda * (o.cwiseAbs().sum() - o.diagonal().cwiseAbs().sum());
  };

  PrecisionEstimate est;
  est.lambda = lambda;
  double previous = penalised(omega);
  for (est.iterations = 1; est.iterations <= max_steps; ++est.iterations) {
    const Eigen::VectorXd u = omega.rowwise().sum();
    const double c = u.sum();
    if (!(c > 0.0)) throw SolverError("compositional surrogate lost positivity");
    const Eigen::VectorXd w = u / c;
    const Eigen::VectorXd sw = s * w;
    Eigen::MatrixXd surrogate = s - sw * ones.transpose() - ones * sw.transpose();
    surrogate.array() += w.dot(sw) + 1.0 / c;
    surrogate = 0.5 * (surrogate + surrogate.transpose()).eval();

    auto step = graphical_lasso(surrogate, lambda);
    const double change =
        ((step.omega - omega).cwiseAbs().array() / (step.omega.cwiseAbs().array() + 1.0))
            .maxCoeff();
    omega = std::move(step.omega);
    est.covariance = std::move(step.covariance);
    const double current = penalised(omega);
    est.dual_trace.push_back(current);
    const bool stalled = std::abs(previous - current) / (std::abs(current) + 1.0) < 1e-8;
    previous = current;
    if (change < tol || stalled) {
      est.converged = step.converged;
      break;
    }
  }
  est.iterations = std::min(est.iterations, max_steps);
  est.omega = std::move(omega);
  est.objective = -previous;
  if (!std::isfinite(previous)) est.converged = false;
  return est;
}

MethodResult gcoda_fit(const CountTable& table, const GcodaParams& params, int workers) {
  (void)workers;  // the path is solved sequentially with warm starts
  bool pseudo_applied = false;
  const auto comp = compositional_input(table, params.counts, params.pseudo, &pseudo_applied);
  const auto clr = clr_transform(comp);
  const Eigen::MatrixXd s = sample_covariance(clr.values);
  const auto path = lambda_path(s, params.nlambda, params.lambda_min_ratio);
  const double n = static_cast<double>(table.n_samples());

  std::vector<CriterionFit> fits(path.values.size());
  std::optional<Eigen::MatrixXd> warm;
  for (std::size_t l = 0; l < path.values.size(); ++l) {
    try {
      auto est = gcoda_solve(s, path.values[l], warm ? &*warm : nullptr);
      fits[l].loglik = -0.5 * n * gcoda_negative_loglik(est.omega, s);
      fits[l].converged = est.converged;
      fits[l].omega = est.omega;
      warm = std::move(est.omega);
    } catch (const SolverError&) {
      fits[l].converged = false;
      fits[l].omega = Eigen::MatrixXd::Identity(s.rows(), s.cols());
    }
  }
  auto selected = ebic_select_fits(fits, n, path, params.ebic_gamma, table.taxa(), "gcoda");

  MethodResult out;
  out.method = Method::gcoda;
  out.params = params.record();
  out.taxa = table.taxa();
  out.selection.lambda = selected.lambda;
  out.selection.lambda_path = path.values;
  out.selection.criterion = selected.scores;
  if (pseudo_applied && !params.counts) {
    out.selection.notes.emplace_back("zeros present: pseudo-count applied before closure");
  }
  out.network = std::move(selected.network);
  return out;
}

}  // namespace cminet
