#pragma once

#include "cminet/network.hpp"
#include "cminet/sparse_graph.hpp"
#include "cminet/table.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cminet {

/// The ten inference algorithms, in the default roster order.
enum class Method {
  pearson,
  spearman,
  bicor,
  sparcc,
  spieceasi_mb,
  spieceasi_glasso,
  spring,
  gcoda,
  cmimn,
  cclasso,
};

inline constexpr std::array<Method, 10> kAllMethods = {
    Method::pearson,      Method::spearman,         Method::bicor,  Method::sparcc,
    Method::spieceasi_mb, Method::spieceasi_glasso, Method::spring, Method::gcoda,
    Method::cmimn,        Method::cclasso,
};

std::string_view to_string(Method m);
std::optional<Method> method_from_string(std::string_view name);
/// True for methods whose native output is already a BinaryNetwork.
bool emits_network(Method m);

using ParamValue = std::variant<bool, long long, double, std::string, std::vector<double>>;
using ParamRecord = std::vector<std::pair<std::string, ParamValue>>;

struct SelectionInfo {
  std::optional<double> lambda;
  std::vector<double> lambda_path;
  std::vector<double> stability;  // StARS instability along the path
  std::vector<double> criterion;  // EBIC along the path
  bool flagged = false;
  std::vector<std::string> notes;
};

/// One algorithm's output over a fixed taxa roster.
struct MethodResult {
  Method method = Method::pearson;
  ParamRecord params;
  Labels taxa;
  std::optional<Eigen::MatrixXd> weights;  // correlation-type association matrix
  std::optional<Eigen::MatrixXd> pvalues;
  std::optional<BinaryNetwork> network;    // native sparse estimate
  SelectionInfo selection;
};

enum class SpiecEasiMode { mb, glasso };

struct SpiecEasiParams {
  SpiecEasiMode mode = SpiecEasiMode::mb;
  double lambda_min_ratio = 1e-2;
  int nlambda = 15;
  int rep_num = 20;
  int ncores = 4;
  double pseudo = 0.5;
  double stars_threshold = 0.1;

  static SpiecEasiParams defaults(SpiecEasiMode mode);
  ParamRecord record() const;
};

struct SpringParams {
  std::string rmethod = "original";
  bool quantitative = true;
  int ncores = 5;
  std::string lambdaseq = "data-specific";
  int nlambda = 15;
  int rep_num = 20;
  double lambda_min_ratio = 1e-2;
  double stars_threshold = 0.1;

  ParamRecord record() const;
};

struct GcodaParams {
  bool counts = false;
  double pseudo = 0.5;
  double lambda_min_ratio = 1e-4;
  int nlambda = 15;
  double ebic_gamma = 0.5;

  ParamRecord record() const;
};

/// Closes the table into compositions. With `counts` the pseudo-count is
/// always added; otherwise it is added only when zeros make the table
/// non-compositional, which is reported through `pseudo_applied`.
CompositionTable compositional_input(const CountTable& table, bool counts, double pseudo,
                                     bool* pseudo_applied = nullptr);

/// CLR composition, Pearson correlation, lambda path, StARS over MB
/// neighbourhood selection (mode mb) or graphical-lasso support (mode glasso).
MethodResult spieceasi_fit(const CountTable& table, const SpiecEasiParams& params,
                           std::uint64_t seed, int workers = 1);

/// mclr, latent Kendall correlation, lambda path, StARS over MB neighbourhood
/// selection driven by the latent correlation matrix.
MethodResult spring_fit(const CountTable& table, const SpringParams& params,
                        std::uint64_t seed, int workers = 1);

/// Negative log-likelihood of CLR data with covariance `s` under basis
/// precision `omega` (compositional likelihood, constants dropped, per sample):
/// -log det omega + tr(omega s) + log(1'omega 1) - 1'omega s omega 1 / 1'omega 1.
double gcoda_negative_loglik(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& s);

/// Penalised compositional precision estimate by majorise-minimise steps,
/// each a graphical lasso on a surrogate covariance.
PrecisionEstimate gcoda_solve(const Eigen::MatrixXd& s, double lambda,
                              const Eigen::MatrixXd* warm_start = nullptr, int max_steps = 100,
                              double tol = 1e-4);

/// CLR covariance, lambda path, EBIC selection over compositional fits.
MethodResult gcoda_fit(const CountTable& table, const GcodaParams& params, int workers = 1);

}  // namespace cminet
