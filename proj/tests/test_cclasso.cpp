#include "support.hpp"

#include "cminet/cclasso.hpp"
#include "cminet/errors.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace cminet;
namespace ts = testsupport;

namespace {

CclassoParams quick() {
  CclassoParams p;
  p.n_boot = 10;
  return p;
}

long off_diagonals_above(const Eigen::MatrixXd& m, double tol) {
  long count = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) count += std::abs(m(i, j)) > tol;
  }
  return count;
}

}  // namespace

TEST_SUITE("cclasso") {

TEST_CASE("defaults") {
  const CclassoParams p;
  CHECK(p.k_cv == 3);
  CHECK(p.lam_int == std::pair<double, double>{1e-4, 1.0});
  CHECK(p.k_max == 20);
  CHECK(p.n_boot == 20);
  CHECK_FALSE(p.counts);
}

TEST_CASE("sign stability p-values") {
  CHECK(sign_stability_pvalue(0.0, {0.5, 0.5}) == 1.0);
  CHECK(sign_stability_pvalue(0.3, std::vector<double>(20, 0.2)) == doctest::Approx(1.0 / 21));
  CHECK(sign_stability_pvalue(-0.3, std::vector<double>(20, 0.2)) == 1.0);
  std::vector<double> mixed(20, 0.1);
  mixed[0] = -0.1;
  mixed[1] = 0.0;
  CHECK(sign_stability_pvalue(0.3, mixed) == doctest::Approx(3.0 / 21));
}

TEST_CASE("noise gives small correlations and large p-values") {
  std::mt19937_64 rng(42);
  const auto counts = ts::lognormal_counts(ts::standard_normal(400, 8, rng));
  const auto res = cclasso_fit(counts, CclassoParams{}, 42);
  const auto& r = res.correlation.values;
  double total = 0.0;
  int pairs = 0, large_p = 0;
  for (Eigen::Index i = 0; i < 8; ++i) {
    for (Eigen::Index j = i + 1; j < 8; ++j) {
      total += std::abs(r(i, j));
      large_p += res.pvalues(i, j) > 0.05;
      ++pairs;
    }
  }
  CHECK(total / pairs < 0.1);
  CHECK(large_p >= 0.9 * pairs);
}

TEST_CASE("planted correlation is the largest with a small p-value") {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(8, 8);
  cov(1, 5) = cov(5, 1) = 0.8;
  const auto counts = ts::lognormal_counts(ts::mvn(400, cov, 42));
  const auto res = cclasso_fit(counts, CclassoParams{}, 42);
  const auto& r = res.correlation.values;
  Eigen::MatrixXd off = r.cwiseAbs();
  off.diagonal().setZero();
  Eigen::Index bi = 0, bj = 0;
  off.maxCoeff(&bi, &bj);
  CHECK(std::min(bi, bj) == 1);
  CHECK(std::max(bi, bj) == 5);
  CHECK(r(1, 5) > 0.5);
  CHECK(res.pvalues(1, 5) <= 0.1);
  CHECK(res.selected_lambda >= 1e-4);
  CHECK(res.selected_lambda <= 1.0);
  CHECK(res.cv_trace.size() <= 20);
}

TEST_CASE("estimate is a correlation matrix") {
  const auto res = cclasso_fit(ts::chain_counts(7, 120, 3), quick(), 3);
  const auto& r = res.correlation.values;
  CHECK(r.diagonal().isApprox(Eigen::VectorXd::Ones(7)));
  CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r).eigenvalues().minCoeff() >= -1e-8);
  CHECK((res.pvalues.array() >= 0.0).all());
  CHECK((res.pvalues.array() <= 1.0).all());
  CHECK(res.correlation.method == "cclasso");
}

TEST_CASE("sparsity grows with the penalty") {
  const auto counts = ts::chain_counts(8, 200, 6);
  const CclassoProblem problem(to_composition(counts, 0.0).values.array().log().matrix());
  const Eigen::MatrixXd& x = problem.log_data();
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd cov = c.transpose() * c / static_cast<double>(x.rows() - 1);
  const int k_max = CclassoParams{}.k_max;
  long previous = 29;
  for (double lambda : {1e-4, 1e-3, 1e-2, 0.05, 0.2, 1.0, 5.0}) {
    INFO("lambda = " << lambda);
    const auto est = problem.solve(cov, lambda, cov, nullptr, k_max);
    const long nonzero = off_diagonals_above(est, 1e-6);
    CHECK(nonzero <= previous);
    previous = nonzero;
  }
  CHECK(previous == 0);

  bool converged = false;
  problem.solve(cov, 0.05, cov, &converged, 5000, 1e-5);
  CHECK(converged);
}

TEST_CASE("fit is deterministic and independent of worker count") {
  const auto counts = ts::chain_counts(6, 90, 12);
  const auto a = cclasso_fit(counts, quick(), 77, 1);
  const auto b = cclasso_fit(counts, quick(), 77, 3);
  CHECK(a.correlation.values == b.correlation.values);
  CHECK(a.pvalues == b.pvalues);
  CHECK(a.selected_lambda == b.selected_lambda);
}

TEST_CASE("invalid settings") {
  const auto counts = ts::chain_counts(5, 8, 1);
  CHECK_THROWS_AS(cclasso_fit(counts, CclassoParams{}, 1), EstimatorError);  // folds of 2
  auto p = CclassoParams{};
  p.k_cv = 1;
  CHECK_THROWS_AS(cclasso_fit(ts::chain_counts(5, 60, 1), p, 1), EstimatorError);
  p = CclassoParams{};
  p.lam_int = {1.0, 0.1};
  CHECK_THROWS_AS(cclasso_fit(ts::chain_counts(5, 60, 1), p, 1), EstimatorError);
  CHECK_THROWS_AS(cclasso_fit(ts::chain_counts(2, 60, 1), CclassoParams{}, 1), EstimatorError);
  p = CclassoParams{};
  p.k_max = 0;
  CHECK_THROWS_AS(cclasso_fit(ts::chain_counts(5, 60, 1), p, 1), EstimatorError);
}

}
