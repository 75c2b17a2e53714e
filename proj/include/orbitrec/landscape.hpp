#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "orbitrec/common.hpp"
#include "orbitrec/models.hpp"

namespace orbit::landscape {

/// Gradient of the Procrustes second-moment mismatch
/// (1/12) || theta^T theta - theta*^T theta* ||^2, as a 3 x m matrix.
Eigen::MatrixXd procrustes_grad_s2(const Eigen::MatrixXd& theta,
                                   const Eigen::MatrixXd& theta_star);

/// Full Hessian of the same objective (3m x 3m), used to certify or escape
/// rank-deficient saddles.
Eigen::MatrixXd procrustes_hess_s2(const Eigen::MatrixXd& theta,
                                   const Eigen::MatrixXd& theta_star);

struct DescentSummary {
  int trials = 0;
  int successes = 0;
  double worst_terminal = 0.0;  // largest terminal objective value
  std::vector<double> terminal_values;
  nlohmann::json to_json() const;
};

/// Random-start descents (Armijo backtracking, negative-curvature escape at
/// flat saddles) on the Procrustes second-moment objective; success means the
/// terminal value falls below 1e-10.
DescentSummary procrustes_descent_experiment(int m, int trials, uint64_t seed);

/// Third-moment objective restricted to the fixed-power variety, as a
/// function of the phase offsets t in R^L: the quoted triple-correlation
/// cosine sum, normalized so the global minimum value is 0.
/// `magnitudes` are the per-frequency magnitudes r_l >= 0.
struct PhaseObjective {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

PhaseObjective mra_phase_objective(const Eigen::VectorXd& magnitudes,
                                   const Eigen::VectorXd& t, bool want_hessian);

struct CriticalPointReport {
  Eigen::VectorXd point;             // chart coordinates
  double value = 0.0;                // objective at the point
  double gradient_norm = 0.0;
  Eigen::VectorXd projected_spectrum;  // Hessian spectrum on the orbit complement
  double null_residual = 0.0;          // ||H e|| / ||H|| for the orbit tangent e
  std::string classification;          // global-min|spurious-min|saddle|unresolved
  double kappa = 0.0, delta = 0.0;     // spurious-search parameters, when used
  nlohmann::json to_json() const;
};

/// Certifies a spurious minimizer of the phase objective at
/// t = (pi, 0, ..., 0) by searching squared-magnitude profiles
/// (1, L^kappa, delta, 1, ..., 1) over the given grids. Requires L >= 30;
/// throws SearchExhaustedError when no grid point certifies.
CriticalPointReport mra_spurious_search(int L,
                                        const std::vector<double>& kappa_grid,
                                        const std::vector<double>& delta_grid);

/// Chart of the moment variety V_{k-1}(theta_star) for the mra model:
/// k = 2 frees all non-mean coordinates; k = 3 frees the L phase offsets at
/// fixed magnitudes.
struct VarietyChart {
  models::ModelSpec model;
  int k = 2;
  Eigen::VectorXd theta_star;
};

struct StepPolicy {
  double init_step = 1.0;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  double grad_tol = 1e-10;
  int max_iters = 20000;
};

CriticalPointReport minimize_sk_on_variety(const VarietyChart& chart,
                                           const Eigen::VectorXd& init,
                                           const StepPolicy& policy = {});

}  // namespace orbit::landscape
