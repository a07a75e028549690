#pragma once

#include "cminet/table.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <random>
#include <string>

namespace bench {

inline Eigen::MatrixXd gaussian(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd z(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(i, j) = nd(rng);
  }
  return z;
}

// AR(1)-style chain: each column mixes in its predecessor.
inline Eigen::MatrixXd chain(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  Eigen::MatrixXd z = gaussian(n, p, seed);
  for (Eigen::Index j = 1; j < p; ++j) z.col(j) += 0.6 * z.col(j - 1);
  return z;
}

inline Eigen::MatrixXd correlation(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd s = c.transpose() * c;
  const Eigen::VectorXd d = s.diagonal().cwiseSqrt().cwiseInverse();
  return d.asDiagonal() * s * d.asDiagonal();
}

inline cminet::Labels names(const std::string& prefix, Eigen::Index n) {
  cminet::Labels out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline cminet::CountTable counts(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  Eigen::MatrixXd v = (chain(n, p, seed).array() + 5.0).exp().round().matrix();
  return cminet::CountTable(std::move(v), names("s", n), names("otu", p));
}

}  // namespace bench
