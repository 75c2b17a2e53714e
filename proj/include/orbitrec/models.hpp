#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "orbitrec/group.hpp"

namespace orbit::models {

enum class ModelKind { mra, mra_projected, sphere, cryo, cryo_projected, procrustes };

std::string kind_name(ModelKind k);
ModelKind kind_from_name(const std::string& name);

/// Model catalog entry: bandlimits, dimensions, coefficient layout.
///
/// Coefficient ordering (fixed so file outputs are stable):
///   mra-kinds:   theta^(0), theta_1^(1), theta_2^(1), ..., theta_1^(L), theta_2^(L)
///   sphere:      l-major, m = -l..l
///   cryo-kinds:  l-major, then s = 1..S_l, then m = -l..l
///   procrustes:  atom-major, xyz within each atom (column-major 3 x m)
///   projected image (cryo_projected): s-major, m = -L..L
struct ModelSpec {
  ModelKind kind = ModelKind::mra;
  int L = 0;
  std::vector<int> S;  // radial bandlimits S_0..S_L (cryo kinds)
  int atoms = 0;       // procrustes

  int dim() const;       // d
  int proj_dim() const;  // d~ (= d for unprojected kinds)
  bool projected() const;
  bool so2_based() const;  // mra kinds
  int max_S() const;

  int mra_offset(int l, int comp) const;        // comp: 1 = cos, 2 = sin
  int sphere_offset(int l, int m) const;
  int cryo_offset(int l, int s, int m) const;   // s is 0-based here
  int image_offset(int s, int m) const;         // projected cryo image plane

  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
};

ModelSpec make_model(ModelKind kind, int L, const std::vector<int>& S = {},
                     int atoms = 0);

/// Dimension decomposition d = d0 + d1 + ... + dK predicted by the moment
/// order theorems; refuses models outside the proven hypotheses.
struct DimLedger {
  int d0 = 0, d1 = 0, d2 = 0, d3 = 0;
  int K = 3;
  int total() const { return d0 + d1 + d2 + d3; }
  std::vector<int> tiers() const;  // (d1, ..., dK)
  // Cumulative ranks (trdeg ladder): after moments of order 1, 2, 3.
  int cum(int k) const;
};

DimLedger predicted_dims(const ModelSpec& model);

/// Vectorized moment tensors T_1..T_k of the (projected) orbit distribution,
/// estimated with the given quadrature rule.
struct MomentStack {
  int k = 0;
  int edge = 0;                       // tensor edge length (d~)
  std::vector<Eigen::VectorXd> tensors;  // tensors[j] has (edge)^{j+1} entries
};

MomentStack moment_tensor(const ModelSpec& model, const Eigen::VectorXd& theta,
                          int k, const group::QuadratureRule& rule,
                          std::ostream* warnings = nullptr);

}  // namespace orbit::models
