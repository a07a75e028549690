#include "support.hpp"

#include "cminet/errors.hpp"
#include "cminet/methods.hpp"
#include "cminet/sparse_graph.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace cminet;
namespace ts = testsupport;

namespace {

Eigen::MatrixXd random_correlation(Eigen::Index p, std::mt19937_64& rng) {
  const Eigen::MatrixXd a = ts::standard_normal(3 * p, p, rng);
  Eigen::MatrixXd c = a.transpose() * a / static_cast<double>(3 * p);
  const Eigen::VectorXd inv = c.diagonal().cwiseSqrt().cwiseInverse();
  return inv.asDiagonal() * c * inv.asDiagonal();
}

Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd cov = c.transpose() * c / static_cast<double>(x.rows() - 1);
  const Eigen::VectorXd inv = cov.diagonal().cwiseSqrt().cwiseInverse();
  return inv.asDiagonal() * cov * inv.asDiagonal();
}

double density(const BinaryNetwork& net) {
  const double p = static_cast<double>(net.size());
  return static_cast<double>(net.edge_count()) / (0.5 * p * (p - 1));
}

double jaccard(const BinaryNetwork& a, const BinaryNetwork& b) {
  long both = 0, either = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = i + 1; j < a.size(); ++j) {
      both += a.has_edge(i, j) && b.has_edge(i, j);
      either += a.has_edge(i, j) || b.has_edge(i, j);
    }
  }
  return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

Eigen::MatrixXd iid_latent(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return ts::standard_normal(n, p, rng);
}

}  // namespace

TEST_SUITE("sparse_graph") {

TEST_CASE("lambda path") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(4, 4);
  s(0, 2) = s(2, 0) = 0.5;
  const auto path = lambda_path(s, 3, 0.01);
  REQUIRE(path.values.size() == 3);
  CHECK(path.values[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(path.values[1] == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(path.values[2] == doctest::Approx(0.005).epsilon(1e-14));

  const auto single = lambda_path(s, 1, 0.01);
  CHECK(single.values == std::vector<double>{0.5});

  std::mt19937_64 rng(7);
  const auto r = random_correlation(6, rng);
  const auto geo = lambda_path(r, 15, 1e-3);
  for (std::size_t k = 2; k < geo.values.size(); ++k) {
    CHECK(geo.values[k] / geo.values[k - 1] ==
          doctest::Approx(geo.values[1] / geo.values[0]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(lambda_path(Eigen::MatrixXd::Identity(3, 3), 5, 0.1), PathError);
}

TEST_CASE("lasso coordinate descent solves a one-dimensional problem exactly") {
  Eigen::MatrixXd q(1, 1);
  q << 2.0;
  Eigen::VectorXd c(1);
  c << 3.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(1);
  const auto st = lasso_quadratic(q, c, 1.0, b, 1e-12, 100);
  CHECK(st.converged);
  CHECK(b[0] == doctest::Approx(1.0));
  lasso_quadratic(q, c, 5.0, b, 1e-12, 100);
  CHECK(b[0] == 0.0);
}

TEST_CASE("graphical lasso at lambda 0 inverts well-conditioned matrices") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_correlation(5, rng);
    const auto est = graphical_lasso(s, 0.0, {1e-10, 1000});
    CHECK(est.converged);
    CHECK((est.omega - s.inverse()).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("graphical lasso shrinks fully above lambda max") {
  std::mt19937_64 rng(5);
  const auto s = random_correlation(6, rng);
  const double lmax = lambda_path(s, 1, 0.5).values[0];
  const auto est = graphical_lasso(s, lmax * 1.01);
  Eigen::MatrixXd off = est.omega;
  off.diagonal().setZero();
  CHECK(off.isZero(0.0));
  CHECK(support_of(est.omega).isZero());
}

TEST_CASE("graphical lasso keeps the identity") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(5, 5);
  for (double lambda : {0.0, 0.1, 1.0}) {
    CHECK((graphical_lasso(id, lambda).omega - id).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("graphical lasso dual objective never decreases and the result is PD") {
  const auto x = ts::mvn(200, ts::chain_precision(8).inverse(), 17);
  const auto s = sample_correlation(x);
  for (double lambda : {0.02, 0.1, 0.3}) {
    const auto est = graphical_lasso(s, lambda, {1e-8, 500});
    REQUIRE(est.dual_trace.size() >= 1);
    for (std::size_t k = 1; k < est.dual_trace.size(); ++k) {
      CHECK(est.dual_trace[k] >= est.dual_trace[k - 1] - 1e-10);
    }
    CHECK((est.omega - est.omega.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(est.omega).eigenvalues().minCoeff() > 0);
  }
}

TEST_CASE("neighbourhood selection on a 3-node chain") {
  Eigen::MatrixXd prec = Eigen::MatrixXd::Identity(3, 3);
  prec(0, 1) = prec(1, 0) = -0.5;
  prec(1, 2) = prec(2, 1) = -0.5;
  const auto x = ts::mvn(1000, prec.inverse(), 11);
  const auto path = lambda_path(sample_correlation(x), 15, 0.01);
  const auto net = mb_neighborhood(x, path.values[7], {"a", "b", "c"});
  CHECK(net.has_edge(0, 1));
  CHECK(net.has_edge(1, 2));
  CHECK_FALSE(net.has_edge(0, 2));
  CHECK(mb_neighborhood(x, 10.0, {"a", "b", "c"}).edge_count() == 0);
  CHECK_THROWS_AS(mb_neighborhood(x.topRows(1), 0.1, {"a", "b", "c"}), EstimatorError);
}

TEST_CASE("OR rule contains AND rule along a path") {
  const auto x = ts::mvn(80, ts::chain_precision(7).inverse(), 23);
  const auto r = sample_correlation(x);
  const auto path = lambda_path(r, 12, 0.01);
  MbOptions and_rule;
  and_rule.rule = CombineRule::and_rule;
  const auto ors = mb_path_from_correlation(r, path.values);
  const auto ands = mb_path_from_correlation(r, path.values, and_rule);
  CHECK(ors.front().isZero());
  for (std::size_t l = 0; l < ors.size(); ++l) {
    CHECK(((ands[l].array() == 1) <= (ors[l].array() == 1)).all());
  }
}

TEST_CASE("edge instability formula") {
  CHECK(edge_instability(Eigen::MatrixXd::Constant(4, 4, 0.5)) == 0.5);
  CHECK(edge_instability(Eigen::MatrixXd::Ones(4, 4)) == 0.0);
  CHECK(edge_instability(Eigen::MatrixXd::Zero(4, 4)) == 0.0);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(3, 3);
  f(0, 1) = f(1, 0) = 0.25;
  CHECK(edge_instability(f) == doctest::Approx(2 * 0.25 * 0.75 / 3));
}

TEST_CASE("StARS is deterministic and recovers a chain") {
  const Eigen::Index p = 10;
  const auto truth = ts::chain_precision(p);
  const auto x = ts::mvn(400, truth.inverse(), 42);
  const auto path = lambda_path(sample_correlation(x), 15, 0.01);
  PathFitter fitter = [](const Eigen::MatrixXd& rows, std::span<const double> lambdas) {
    return mb_path_from_correlation(lenient_pearson(rows), lambdas);
  };
  StarsParams params;
  params.rep_num = 20;
  const auto labels = ts::labels("t", p);
  const auto a = stars_select(x, fitter, path, params, labels, "mb");
  params.workers = 3;
  const auto b = stars_select(x, fitter, path, params, labels, "mb");
  CHECK(a.lambda == b.lambda);
  CHECK(a.network == b.network);
  CHECK(a.instability == b.instability);
  for (std::size_t l = 0; l < a.instability.size(); ++l) {
    CHECK(a.instability[l] >= 0.0);
    CHECK(a.instability[l] <= 0.5);
  }
  CHECK(a.monotone_instability[a.index] <= params.beta_threshold);
  CHECK(ts::edge_f1(a.network, truth) >= 0.8);
}

TEST_CASE("StARS flags a path without an admissible lambda") {
  const auto x = ts::mvn(60, ts::chain_precision(5).inverse(), 3);
  LambdaPath path;
  path.values = {0.5, 0.4};
  // Each subsample gets a coin-flip edge pattern, so nothing is stable.
  std::mt19937_64 coin(1);
  PathFitter noisy = [&coin](const Eigen::MatrixXd&, std::span<const double> lambdas) {
    std::vector<Adjacency> out;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      Adjacency a = Adjacency::Zero(5, 5);
      for (Eigen::Index i = 0; i < 5; ++i) {
        for (Eigen::Index j = i + 1; j < 5; ++j) a(i, j) = a(j, i) = static_cast<int>(coin() & 1);
      }
      out.push_back(a);
    }
    return out;
  };
  StarsParams params;
  params.beta_threshold = 0.01;
  const auto res = stars_select(x, noisy, path, params, ts::labels("t", 5), "noise");
  CHECK(res.flagged);
  CHECK(res.index < 2);
}

TEST_CASE("EBIC with gamma 0 is BIC") {
  const auto x = ts::mvn(300, ts::chain_precision(6).inverse(), 8);
  const auto s = sample_correlation(x);
  const auto path = lambda_path(s, 10, 0.01);
  const auto labels = ts::labels("t", 6);
  const auto res = ebic_select(s, 300, path, 0.0, labels, "glasso");
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  long best_edges = 0;
  for (std::size_t l = 0; l < path.values.size(); ++l) {
    const auto est = graphical_lasso(s, path.values[l]);
    const long e = support_of(est.omega).sum() / 2;
    const double ld = std::log(est.omega.determinant());
    const double bic = -300.0 * (ld - s.cwiseProduct(est.omega).sum()) + e * std::log(300.0);
    CHECK(res.scores[l] == doctest::Approx(bic).epsilon(1e-9));
    if (bic < best_score || (bic == best_score && e < best_edges)) {
      best = l;
      best_score = bic;
      best_edges = e;
    }
  }
  CHECK(res.index == best);
  CHECK(ebic_score(-10.0, 3, 100, 8, 0.0) == doctest::Approx(20.0 + 3 * std::log(100.0)));
  CHECK(ebic_score(-10.0, 3, 100, 8, 0.5) ==
        doctest::Approx(20.0 + 3 * std::log(100.0) + 6 * std::log(8.0)));
}

TEST_CASE("EBIC selects an empty network for identity input") {
  LambdaPath path;
  path.values = {0.5, 0.1, 0.01};
  const auto res =
      ebic_select(Eigen::MatrixXd::Identity(5, 5), 100, path, 0.5, ts::labels("t", 5), "g");
  CHECK(res.network.edge_count() == 0);
  CHECK(res.index == 0);
}

TEST_CASE("EBIC finds two strong partial correlations") {
  Eigen::MatrixXd prec = Eigen::MatrixXd::Identity(5, 5);
  prec(0, 1) = prec(1, 0) = 0.45;
  prec(2, 4) = prec(4, 2) = -0.45;
  const auto x = ts::mvn(500, prec.inverse(), 31);
  const auto s = sample_correlation(x);
  const auto res = ebic_select(s, 500, lambda_path(s, 15, 0.01), 0.5, ts::labels("t", 5), "g");
  CHECK(res.network.has_edge(0, 1));
  CHECK(res.network.has_edge(2, 4));
}

TEST_CASE("EBIC raises when no fit converged") {
  LambdaPath path;
  path.values = {0.3, 0.1};
  std::vector<CriterionFit> fits(2);
  CHECK_THROWS_AS(ebic_select_fits(fits, 50, path, 0.5, ts::labels("t", 3), "x"),
                  SelectionError);
}

TEST_CASE("method defaults") {
  const auto mb = SpiecEasiParams::defaults(SpiecEasiMode::mb);
  CHECK(mb.rep_num == 20);
  CHECK(mb.ncores == 4);
  CHECK(mb.nlambda == 15);
  const auto gl = SpiecEasiParams::defaults(SpiecEasiMode::glasso);
  CHECK(gl.rep_num == 50);
  const SpringParams spring;
  CHECK(spring.rmethod == "original");
  CHECK(spring.rep_num == 20);
  CHECK(spring.ncores == 5);
  CHECK(spring.nlambda == 15);
  const GcodaParams gcoda;
  CHECK(gcoda.ebic_gamma == 0.5);
  CHECK(gcoda.lambda_min_ratio == 1e-4);
  CHECK(gcoda.nlambda == 15);
}

TEST_CASE("sparse methods stay sparse on independent data") {
  const auto counts = ts::lognormal_counts(iid_latent(500, 10, 99));
  const auto mb = spieceasi_fit(counts, SpiecEasiParams::defaults(SpiecEasiMode::mb), 42);
  CHECK(density(*mb.network) < 0.05);
  const auto spring = spring_fit(counts, SpringParams{}, 42);
  CHECK(density(*spring.network) < 0.05);
}

TEST_CASE("SPRING agrees with SPIEC-EASI mb on Gaussian data") {
  const auto latent = ts::mvn(500, ts::chain_precision(10).inverse(), 42);
  const auto counts = ts::lognormal_counts(latent, 12.0);
  const auto mb = spieceasi_fit(counts, SpiecEasiParams::defaults(SpiecEasiMode::mb), 42);
  const auto spring = spring_fit(counts, SpringParams{}, 42);
  CHECK(jaccard(*mb.network, *spring.network) >= 0.7);
}

TEST_CASE("spieceasi glasso recovers a chain") {
  const auto truth = ts::chain_precision(10);
  const auto counts = ts::chain_counts(10, 500, 42);
  auto params = SpiecEasiParams::defaults(SpiecEasiMode::glasso);
  params.rep_num = 20;
  const auto res = spieceasi_fit(counts, params, 42);
  CHECK(ts::edge_f1(*res.network, truth) >= 0.8);
  CHECK(res.selection.lambda.has_value());
}

TEST_CASE("gcoda") {
  const auto truth = ts::chain_precision(10);
  const auto res = gcoda_fit(ts::chain_counts(10, 500, 42), GcodaParams{});
  CHECK(ts::edge_f1(*res.network, truth) >= 0.7);
  CHECK(res.selection.criterion.size() == 15);

  const auto null = gcoda_fit(ts::lognormal_counts(iid_latent(500, 8, 4)), GcodaParams{});
  CHECK(null.network->edge_count() == 0);

  // At omega = identity the likelihood reduces to tr(S) - 1'S1/p + log p.
  std::mt19937_64 rng(2);
  const auto s = random_correlation(4, rng);
  const double expected = s.trace() + std::log(4.0) - s.sum() / 4.0;
  CHECK(gcoda_negative_loglik(Eigen::MatrixXd::Identity(4, 4), s) ==
        doctest::Approx(expected).epsilon(1e-12));
}

}
