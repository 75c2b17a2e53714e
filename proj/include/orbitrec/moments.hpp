#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "orbitrec/group.hpp"
#include "orbitrec/models.hpp"

namespace orbit::moments {

/// Degree-3 invariant map entry. Radial indices are -1 for models without
/// a radial component (mra kinds, sphere); otherwise 0-based.
struct BispectrumEntry {
  int l, s, lp, sp, lpp, spp;
};

struct BispectrumVector {
  std::vector<BispectrumEntry> index;
  Eigen::VectorXcd values;
  void write_csv(std::ostream& os) const;
};

/// The model's degree-3 invariants: coupled harmonic triples for the SO(3)
/// models, Fourier triple products u^(l) conj(u^(l') u^(l'')) over l = l'+l''
/// for the mra kinds.
BispectrumVector bispectrum(const models::ModelSpec& model,
                            const Eigen::VectorXd& theta);

/// Value (and analytic gradient) of the order-k moment-mismatch term: the
/// scaled squared distance between the k-th (projected) moment tensors of
/// theta and theta_star.
struct SeriesTerm {
  int k = 0;
  double value = 0.0;
  Eigen::VectorXd gradient;  // empty when not computed (oracle path)
};

/// Closed form, exactly as the per-model polynomial identities give it.
SeriesTerm s_closed(const models::ModelSpec& model, const Eigen::VectorXd& theta,
                    const Eigen::VectorXd& theta_star, int k);

/// Quadrature oracle: the inner-product form of the same quantity,
/// E_g[<theta,g theta>^k - 2 <theta,g theta*>^k + <theta*,g theta*>^k]/(2 k!),
/// with a double expectation over (g,h) for the projected kinds.
SeriesTerm s_oracle(const models::ModelSpec& model, const Eigen::VectorXd& theta,
                    const Eigen::VectorXd& theta_star, int k,
                    const group::QuadratureRule& rule);

/// Root-feature matrix F with nabla^2 s_k(theta_star) = F^T F (Gauss-Newton
/// form; exact at theta_star since the residual vanishes there).
Eigen::MatrixXd hessian_factor(const models::ModelSpec& model,
                               const Eigen::VectorXd& theta_star, int k);

/// F^T F; positive semidefinite by construction.
Eigen::MatrixXd s_hessian_at_star(const models::ModelSpec& model,
                                  const Eigen::VectorXd& theta_star, int k);

/// Root features R with s_k(theta) = ||R(theta) - R(theta_star)||^2.
/// J (optional) receives dR/dtheta. Exposed for the rank machinery.
void features(const models::ModelSpec& model, int k, const Eigen::VectorXd& theta,
              Eigen::VectorXd& R, Eigen::MatrixXd* J);

/// Harmonic-triple values and Jacobian in theta coordinates (sphere/cryo
/// kinds): rows follow bispectrum() ordering.
void eval_bispectrum(const models::ModelSpec& model, const Eigen::VectorXd& theta,
                     Eigen::VectorXcd& B, Eigen::MatrixXcd* dB);

}  // namespace orbit::moments
