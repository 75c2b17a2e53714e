#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "orbitrec/common.hpp"

namespace orbit::group {

struct GroupElement {
  enum class Kind { SO2, SO3 };
  Kind kind = Kind::SO2;
  double angle = 0.0;                    // SO2: g in [0,1)
  std::array<double, 3> euler{0, 0, 0};  // SO3: z-y-z (alpha, beta, gamma)

  static GroupElement so2(double g);
  static GroupElement so3(double alpha, double beta, double gamma);
  static GroupElement identity(Kind k);
};

/// Nodes + weights approximating Haar measure. Weights sum to 1; for SO(3)
/// the beta weights solve the polar moment system in least squares and the
/// solver residual is kept for diagnostics.
struct QuadratureRule {
  GroupElement::Kind kind = GroupElement::Kind::SO2;
  std::vector<GroupElement> nodes;
  std::vector<double> weights;
  double beta_residual = 0.0;  // 0 for SO2
  int degree = 0;              // polynomial degree the rule integrates exactly

  std::vector<double> cdf;  // cumulative weights, for sampling
  void finalize();          // normalizes weights, builds cdf

  nlohmann::json to_json() const;
  static QuadratureRule from_json(const nlohmann::json& j);
};

/// Uniform n-point rule on SO(2); exact for trig polynomials of degree < n.
QuadratureRule so2_rule(int n);

/// Product rule on SO(3): uniform alpha/gamma grids, linearly spaced beta in
/// [0,pi] with weights solving sum_i w_i P_l(cos beta_i) = 1{l=0} for
/// 0 <= l < n_beta. Throws if the solve fails or negative mass exceeds 1e-8.
QuadratureRule so3_rule(int n_alpha, int n_beta, int n_gamma);

/// Draws a node index with probability proportional to its weight.
int sample_node(const QuadratureRule& rule, SeedStream& stream);
GroupElement sample_rotation(const QuadratureRule& rule, SeedStream& stream);

/// z-y-z Euler angles -> 3x3 rotation matrix Rz(a)Ry(b)Rz(c), and back.
Eigen::Matrix3d euler_to_matrix(const std::array<double, 3>& euler);
std::array<double, 3> matrix_to_euler(const Eigen::Matrix3d& R);

/// Group composition g2 * g1 (apply g1 first).
GroupElement compose(const GroupElement& g2, const GroupElement& g1);

}  // namespace orbit::group
