#pragma once

#include <Eigen/Dense>

#include "orbitrec/group.hpp"
#include "orbitrec/models.hpp"

namespace orbit::group {

/// Real coefficients -> complex harmonic coefficients (unitary).
/// mra: u^(0) = theta^(0), u^(l) = theta_1 + i theta_2 (length L+1 complex).
/// sphere/cryo kinds: the per-frequency unitary with the model's parity
/// phases; layout matches the model's (l[,s],m) ordering.
Eigen::VectorXcd to_complex(const models::ModelSpec& model,
                            const Eigen::VectorXd& theta);
Eigen::VectorXd from_complex(const models::ModelSpec& model,
                             const Eigen::VectorXcd& u);

/// Orthogonal action of a group element on the coefficient vector.
Eigen::VectorXd act(const models::ModelSpec& model, const GroupElement& g,
                    const Eigen::VectorXd& theta);

/// Dense matrix of act(g, .) (test / precompute use).
Eigen::MatrixXd action_matrix(const models::ModelSpec& model,
                              const GroupElement& g);

}  // namespace orbit::group

namespace orbit::models {

/// Linear projection Pi for the projected kinds (throws on others).
Eigen::VectorXd project(const ModelSpec& model, const Eigen::VectorXd& theta);

/// Complex coefficients of the projected image (cryo_projected), i.e. the
/// central-slice map applied in the harmonic domain.
Eigen::VectorXcd project_complex(const ModelSpec& model,
                                 const Eigen::VectorXcd& u);

/// Pi composed with the group action; identity projection for unprojected
/// kinds. This is the mixture-center map of the observation model.
Eigen::VectorXd observe(const ModelSpec& model, const group::GroupElement& g,
                        const Eigen::VectorXd& theta);

}  // namespace orbit::models
