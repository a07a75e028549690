#include "cminet/sparcc.hpp"

#include "cminet/errors.hpp"
#include "cminet/parallel.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace cminet {

namespace {

using PairList = std::vector<std::pair<Eigen::Index, Eigen::Index>>;

Eigen::VectorXd basis_variance(const Eigen::MatrixXd& m, const Eigen::MatrixXd& variation,
                               double vmin) {
  Eigen::VectorXd v = m.partialPivLu().solve(variation.rowwise().sum());
  return v.cwiseMax(vmin);
}

Eigen::MatrixXd correlation_from_variance(const Eigen::MatrixXd& variation,
                                          const Eigen::VectorXd& v) {
  const Eigen::Index p = v.size();
  Eigen::MatrixXd c(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      c(i, j) = (v[i] + v[j] - variation(i, j)) / (2.0 * std::sqrt(v[i] * v[j]));
    }
  }
  return c;
}

double nan_median(std::vector<double>& values) {
  std::erase_if(values, [](double x) { return std::isnan(x); });
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

Eigen::MatrixXd log_ratio_variation(const Eigen::MatrixXd& fractions) {
  const Eigen::MatrixXd logs = fractions.array().log().matrix();
  const Eigen::Index p = logs.cols();
  const double denom = static_cast<double>(logs.rows() - 1);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      Eigen::VectorXd d = logs.col(i) - logs.col(j);
      d.array() -= d.mean();
      t(i, j) = t(j, i) = d.squaredNorm() / denom;
    }
  }
  return t;
}

Eigen::MatrixXd sparcc_basis_correlation(const Eigen::MatrixXd& variation,
                                         const SparccParams& params, PairList* excluded_out) {
  const Eigen::Index p = variation.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(p, p);
  m.diagonal().array() += static_cast<double>(p - 2);
  Eigen::MatrixXd working = variation;

  Eigen::VectorXd v = basis_variance(m, working, params.vmin);
  Eigen::MatrixXd c = correlation_from_variance(variation, v);

  PairList excluded;
  std::vector<int> per_component(static_cast<std::size_t>(p), 0);
  std::vector<bool> component_out(static_cast<std::size_t>(p), false);
  auto is_excluded = [&](Eigen::Index i, Eigen::Index j) {
    return std::find(excluded.begin(), excluded.end(), std::pair{i, j}) != excluded.end();
  };

  for (int round = 0; round < params.kmax; ++round) {
    double best = params.alpha;
    std::optional<std::pair<Eigen::Index, Eigen::Index>> pick;
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = i + 1; j < p; ++j) {
        const double a = std::abs(c(i, j));
        if (!std::isnan(a) && a > best && !is_excluded(i, j)) {
          best = a;
          pick = std::pair{i, j};
        }
      }
    }
    if (!pick) break;
    const auto [i, j] = *pick;
    excluded.push_back(*pick);
    m(i, j) -= 1.0;
    m(j, i) -= 1.0;
    m(i, i) -= 1.0;
    m(j, j) -= 1.0;
    working(i, j) = working(j, i) = 0.0;
    ++per_component[i];
    ++per_component[j];

    std::vector<Eigen::Index> newly_out;
    long total_out = 0;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (per_component[k] >= p - 3) {
        ++total_out;
        if (!component_out[k]) newly_out.push_back(k);
      }
    }
    if (total_out > p - 4) {
      // Too few components left to re-solve; keep the current estimate.
      break;
    }
    for (auto k : newly_out) {
      component_out[k] = true;
      working.row(k).setZero();
      working.col(k).setZero();
      m.row(k).setZero();
      m.col(k).setZero();
      m(k, k) = 1.0;
    }
    v = basis_variance(m, working, params.vmin);
    c = correlation_from_variance(variation, v);
    for (Eigen::Index k = 0; k < p; ++k) {
      if (component_out[k]) {
        c.row(k).setConstant(std::numeric_limits<double>::quiet_NaN());
        c.col(k).setConstant(std::numeric_limits<double>::quiet_NaN());
      }
    }
  }
  if (excluded_out) *excluded_out = excluded;
  return c;
}

CorrelationMatrix sparcc_fit(const CountTable& table, const SparccParams& params,
                             std::uint64_t seed) {
  const Eigen::Index n = table.n_samples();
  const Eigen::Index p = table.n_taxa();
  if (p < 4) throw EstimatorError("SparCC requires at least 4 taxa");
  if (n < 4) throw EstimatorError("SparCC requires at least 4 samples");
  if (params.imax < 1 || params.kmax < 0 || !(params.alpha > 0.0 && params.alpha < 1.0) ||
      !(params.vmin > 0.0)) {
    throw EstimatorError("invalid SparCC parameters");
  }
  const auto& counts = table.values();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (counts.col(j).sum() == 0.0) {
      throw EstimatorError("taxon '" + table.taxa()[j] + "' is all zero; filter it first");
    }
  }

  std::vector<Eigen::MatrixXd> draws(static_cast<std::size_t>(params.imax));
  parallel_for(draws.size(), params.workers, [&](std::size_t it) {
    std::mt19937_64 rng(derive_seed(seed, it));
    Eigen::MatrixXd fractions(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        std::gamma_distribution<double> gamma(counts(i, j) + 1.0, 1.0);
        fractions(i, j) = std::max(gamma(rng), std::numeric_limits<double>::min());
      }
      fractions.row(i) /= fractions.row(i).sum();
    }
    draws[it] = sparcc_basis_correlation(log_ratio_variation(fractions), params);
  });

  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p, p);
  std::vector<double> entry(draws.size());
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      entry.resize(draws.size());
      for (std::size_t it = 0; it < draws.size(); ++it) {
        entry[it] = 0.5 * (draws[it](i, j) + draws[it](j, i));
      }
      const double med = std::clamp(nan_median(entry), -1.0, 1.0);
      r(i, j) = r(j, i) = med;
    }
  }
  return {std::move(r), "sparcc", table.taxa()};
}

}  // namespace cminet
