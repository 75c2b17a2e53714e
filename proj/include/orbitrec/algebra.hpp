#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "orbitrec/common.hpp"
#include "orbitrec/models.hpp"

namespace orbit::algebra {

/// Orthogonal reparametrization splitting each complex coefficient into
/// scaled real/imaginary parts with the parity-forced zeros removed
/// (identity for the mra kinds and procrustes, where theta already is such
/// a chart). eta = M * theta with M a signed permutation.
struct EtaChart {
  Eigen::MatrixXd M;
  Eigen::VectorXd to_eta(const Eigen::VectorXd& theta) const { return M * theta; }
  Eigen::VectorXd to_theta(const Eigen::VectorXd& eta) const {
    return M.transpose() * eta;
  }
};

EtaChart eta_chart(const models::ModelSpec& model);

struct RankPolicy {
  double rel_tol = 1e-9;     // singular values below rel_tol * sigma_max are 0
  double min_gap = 1e3;      // required relative gap at the cut
  int max_redraws = 5;
};

struct RankResult {
  int rank = 0;
  double gap = 0.0;  // sigma_r / sigma_{r+1}; inf when the tail is empty/zero
  Eigen::VectorXd singular_values;
};

/// Rank by singular-value thresholding; rows are normalized first to tame
/// the dynamic range of factorial-heavy entries.
RankResult numerical_rank(const Eigen::MatrixXd& mat, const RankPolicy& policy);

/// Numerical transcendence-degree ladder: cumulative ranks of the
/// Gauss-Newton factors of the order-1..K moment terms at a generic point.
struct RankReport {
  models::ModelSpec model;
  models::DimLedger predicted;
  std::vector<int> ranks;          // cumulative, k = 1..K
  std::vector<int> expected;       // predicted cumulative ranks
  std::vector<double> gaps;        // relative gap at each cut
  std::vector<Eigen::VectorXd> spectra;
  double tol = 0.0;
  int redraws = 0;
  bool match = false;

  nlohmann::json to_json() const;
};

/// theta_star drawn i.i.d. N(0,1) from the seed; redrawn (up to
/// policy.max_redraws) when a rank falls short of the prediction or no clear
/// spectral gap exists at the cut.
RankReport trdeg_ladder(const models::ModelSpec& model, SeedStream seed,
                        const RankPolicy& policy = {});

/// Same ladder at a caller-supplied point (no redraws).
RankReport trdeg_ladder_at(const models::ModelSpec& model,
                           const Eigen::VectorXd& theta_star,
                           const RankPolicy& policy = {});

/// Real-stacked Jacobian of the full harmonic-triple map in eta coordinates
/// (sphere: Re and Im rows per tuple; cryo: real-valued rows).
Eigen::MatrixXd bispectrum_jacobian(const models::ModelSpec& model,
                                    const Eigen::VectorXd& eta);

/// Numerical rank of the Jacobian of all pairwise inner products of S random
/// vectors in R^{2l+1}; equals S(S+1)/2 when S < 2l+1, else (2l+1)(S-l).
int pairwise_gram_rank(int l, int S, SeedStream seed);

}  // namespace orbit::algebra
