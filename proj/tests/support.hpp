#pragma once

#include "cminet/network.hpp"
#include "cminet/table.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace testsupport {

inline cminet::Labels labels(const std::string& prefix, Eigen::Index n) {
  cminet::Labels out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline Eigen::MatrixXd standard_normal(Eigen::Index n, Eigen::Index p, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd z(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(i, j) = nd(rng);
  }
  return z;
}

/// Rows drawn from N(0, cov).
inline Eigen::MatrixXd mvn(Eigen::Index n, const Eigen::MatrixXd& cov, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  return standard_normal(n, cov.rows(), rng) * llt.matrixL().transpose();
}

/// Tridiagonal precision: unit diagonal, `off` on the first off-diagonals.
inline Eigen::MatrixXd chain_precision(Eigen::Index p, double off = 0.4) {
  Eigen::MatrixXd prec = Eigen::MatrixXd::Identity(p, p);
  for (Eigen::Index i = 0; i + 1 < p; ++i) prec(i, i + 1) = prec(i + 1, i) = off;
  return prec;
}

/// Rounded exp(latent + shift): log-normal absolute abundances as counts.
inline cminet::CountTable lognormal_counts(const Eigen::MatrixXd& latent, double shift = 5.0) {
  Eigen::MatrixXd counts = (latent.array() + shift).exp().round().matrix();
  return cminet::CountTable(std::move(counts), labels("s", latent.rows()),
                            labels("otu", latent.cols()));
}

inline cminet::CountTable chain_counts(Eigen::Index p, Eigen::Index n, std::uint64_t seed) {
  return lognormal_counts(mvn(n, chain_precision(p).inverse(), seed));
}

/// Edge F1 of `net` against the nonzero off-diagonal pattern of `truth`.
inline double edge_f1(const cminet::BinaryNetwork& net, const Eigen::MatrixXd& truth) {
  int tp = 0, fp = 0, fn = 0;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < truth.cols(); ++j) {
      const bool real = truth(i, j) != 0.0;
      const bool found = net.has_edge(i, j);
      tp += real && found;
      fp += !real && found;
      fn += real && !found;
    }
  }
  return tp == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cminet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport
