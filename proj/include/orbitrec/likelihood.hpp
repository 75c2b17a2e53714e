#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "orbitrec/common.hpp"
#include "orbitrec/group.hpp"
#include "orbitrec/models.hpp"

namespace orbit::likelihood {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;

/// Observations y_i = Pi(g_i theta_star) + sigma eps_i, rotations drawn from
/// the quadrature distribution. Hidden node indices are diagnostics only and
/// never feed the estimators.
struct SampleBatch {
  models::ModelSpec model;
  double sigma = 0.0;
  uint64_t seed = 0;
  RowMat y;  // n x d~
  std::vector<int> hidden_nodes;

  int n() const { return int(y.rows()); }
  void save(const std::string& path) const;
  static SampleBatch load(const std::string& path);
};

SampleBatch generate(const models::ModelSpec& model,
                     const Eigen::VectorXd& theta_star, double sigma, int n,
                     const group::QuadratureRule& rule, uint64_t seed);

/// Marginal negative log-likelihood R_n(theta) of the quadrature mixture,
/// including the Gaussian normalizer; log-sum-exp with per-sample max shift.
double neg_log_lik(const models::ModelSpec& model, const Eigen::VectorXd& theta,
                   const SampleBatch& batch, const group::QuadratureRule& rule,
                   int threads = 1);

Eigen::VectorXd nll_gradient(const models::ModelSpec& model,
                             const Eigen::VectorXd& theta,
                             const SampleBatch& batch,
                             const group::QuadratureRule& rule,
                             int threads = 1);

Eigen::MatrixXd nll_hessian(const models::ModelSpec& model,
                            const Eigen::VectorXd& theta,
                            const SampleBatch& batch,
                            const group::QuadratureRule& rule,
                            int threads = 1);

/// nabla^2 R_n at the generating point.
Eigen::MatrixXd observed_fisher(const models::ModelSpec& model,
                                const Eigen::VectorXd& theta_star,
                                const SampleBatch& batch,
                                const group::QuadratureRule& rule,
                                int threads = 1);

/// Eigenvalue tiers of the observed information across an inverse-SNR grid
/// alpha = sigma^2 / ||theta_star||^2, with per-tier percentile tracks and
/// log-log scaling fits against 1/alpha.
struct SpectrumReport {
  models::ModelSpec model;
  models::DimLedger ledger;
  std::vector<double> alphas;
  std::vector<Eigen::VectorXd> eigenvalues;  // per alpha, descending
  static constexpr std::array<int, 5> kPercentiles{10, 30, 50, 70, 90};
  // track[a][tier][p]: eigenvalue percentiles within each tier
  std::vector<std::vector<std::array<double, 5>>> track;
  std::vector<double> slopes;     // per tier, log(median) vs log(1/alpha)
  std::vector<double> residuals;  // max abs deviation of the linear fit
  double runtime_seconds = 0.0;

  void write_csv(std::ostream& os) const;
  nlohmann::json summary_json() const;
};

SpectrumReport tier_scaling(const models::ModelSpec& model,
                            const Eigen::VectorXd& theta_star,
                            const std::vector<double>& alpha_grid, int n,
                            const group::QuadratureRule& rule, uint64_t seed,
                            int threads = 1);

}  // namespace orbit::likelihood
