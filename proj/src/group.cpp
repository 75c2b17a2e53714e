#include "orbitrec/group.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "orbitrec/harmonics.hpp"

namespace orbit::group {

GroupElement GroupElement::so2(double g) {
  GroupElement e;
  e.kind = Kind::SO2;
  e.angle = g - std::floor(g);  // canonical [0,1)
  return e;
}

GroupElement GroupElement::so3(double alpha, double beta, double gamma) {
  auto wrap = [](double a) {
    double w = std::fmod(a, kTwoPi);
    return w < 0 ? w + kTwoPi : w;
  };
  GroupElement e;
  e.kind = Kind::SO3;
  e.euler = {wrap(alpha), std::clamp(beta, 0.0, kPi), wrap(gamma)};
  return e;
}

GroupElement GroupElement::identity(Kind k) {
  return k == Kind::SO2 ? so2(0.0) : so3(0.0, 0.0, 0.0);
}

void QuadratureRule::finalize() {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0)) throw std::runtime_error("quadrature: nonpositive mass");
  double neg = 0.0;
  for (double& w : weights) {
    w /= total;
    if (w < 0) neg -= w;
  }
  if (neg > 1e-8)
    throw std::runtime_error("quadrature: negative mass " + std::to_string(neg));
  cdf.resize(weights.size());
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += std::max(weights[i], 0.0);
    cdf[i] = acc;
  }
  for (double& c : cdf) c /= acc;
  cdf.back() = 1.0;
}

nlohmann::json QuadratureRule::to_json() const {
  nlohmann::json j;
  j["group"] = kind == GroupElement::Kind::SO2 ? "so2" : "so3";
  auto& n = j["nodes"] = nlohmann::json::array();
  for (const auto& g : nodes) {
    if (kind == GroupElement::Kind::SO2)
      n.push_back({g.angle});
    else
      n.push_back({g.euler[0], g.euler[1], g.euler[2]});
  }
  j["weights"] = weights;
  j["beta_residual"] = beta_residual;
  j["degree"] = degree;
  return j;
}

QuadratureRule QuadratureRule::from_json(const nlohmann::json& j) {
  QuadratureRule r;
  r.kind = j.at("group") == "so2" ? GroupElement::Kind::SO2
                                  : GroupElement::Kind::SO3;
  for (const auto& n : j.at("nodes")) {
    if (r.kind == GroupElement::Kind::SO2)
      r.nodes.push_back(GroupElement::so2(n.at(0).get<double>()));
    else
      r.nodes.push_back(GroupElement::so3(n.at(0).get<double>(),
                                          n.at(1).get<double>(),
                                          n.at(2).get<double>()));
  }
  r.weights = j.at("weights").get<std::vector<double>>();
  r.beta_residual = j.value("beta_residual", 0.0);
  r.degree = j.value("degree", 0);
  r.finalize();
  return r;
}

QuadratureRule so2_rule(int n) {
  if (n < 2) throw std::invalid_argument("so2_rule: need n >= 2");
  QuadratureRule r;
  r.kind = GroupElement::Kind::SO2;
  r.nodes.reserve(n);
  for (int i = 0; i < n; ++i) r.nodes.push_back(GroupElement::so2(double(i) / n));
  r.weights.assign(n, 1.0 / n);
  r.degree = n - 1;
  r.finalize();
  return r;
}

QuadratureRule so3_rule(int n_alpha, int n_beta, int n_gamma) {
  if (n_alpha < 2 || n_beta < 2 || n_gamma < 2)
    throw std::invalid_argument("so3_rule: need all counts >= 2");

  // Beta weights: exactness of the polar moments up to degree n_beta-1.
  Eigen::VectorXd beta(n_beta);
  for (int i = 0; i < n_beta; ++i)
    beta[i] = kPi * double(i) / double(n_beta - 1);
  Eigen::MatrixXd A(n_beta, n_beta);
  for (int l = 0; l < n_beta; ++l)
    for (int i = 0; i < n_beta; ++i)
      A(l, i) = harmonics::legendre_p(l, std::cos(beta[i]));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_beta);
  rhs[0] = 1.0;
  Eigen::VectorXd w = A.colPivHouseholderQr().solve(rhs);
  double residual = (A * w - rhs).norm();
  if (!w.allFinite())
    throw std::runtime_error("so3_rule: beta weight solve failed, residual " +
                             std::to_string(residual));

  QuadratureRule r;
  r.kind = GroupElement::Kind::SO3;
  r.nodes.reserve(size_t(n_alpha) * n_beta * n_gamma);
  r.weights.reserve(r.nodes.capacity());
  for (int a = 0; a < n_alpha; ++a) {
    double alpha = kTwoPi * a / n_alpha;
    for (int b = 0; b < n_beta; ++b) {
      for (int c = 0; c < n_gamma; ++c) {
        double gamma = kTwoPi * c / n_gamma;
        r.nodes.push_back(GroupElement::so3(alpha, beta[b], gamma));
        r.weights.push_back(w[b] / (double(n_alpha) * n_gamma));
      }
    }
  }
  r.beta_residual = residual;
  r.degree = std::min({n_alpha - 1, n_beta - 1, n_gamma - 1});
  r.finalize();
  return r;
}

int sample_node(const QuadratureRule& rule, SeedStream& stream) {
  if (rule.cdf.empty()) throw std::invalid_argument("sample_node: empty rule");
  double u = stream.uniform();
  auto it = std::upper_bound(rule.cdf.begin(), rule.cdf.end(), u);
  return int(std::min<size_t>(it - rule.cdf.begin(), rule.cdf.size() - 1));
}

GroupElement sample_rotation(const QuadratureRule& rule, SeedStream& stream) {
  return rule.nodes[sample_node(rule, stream)];
}

Eigen::Matrix3d euler_to_matrix(const std::array<double, 3>& e) {
  auto rz = [](double t) {
    Eigen::Matrix3d m;
    m << std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1;
    return m;
  };
  Eigen::Matrix3d ry;
  ry << std::cos(e[1]), 0, std::sin(e[1]), 0, 1, 0, -std::sin(e[1]), 0,
      std::cos(e[1]);
  return rz(e[0]) * ry * rz(e[2]);
}

std::array<double, 3> matrix_to_euler(const Eigen::Matrix3d& R) {
  double beta = std::acos(std::clamp(R(2, 2), -1.0, 1.0));
  double sb = std::sin(beta);
  if (std::abs(sb) < 1e-12) {
    // Gimbal: R = Rz(alpha +/- gamma); put everything in alpha.
    double alpha = std::atan2(R(1, 0), R(0, 0));
    if (R(2, 2) < 0) return {alpha, kPi, 0.0};
    return {alpha, 0.0, 0.0};
  }
  double alpha = std::atan2(R(1, 2), R(0, 2));
  double gamma = std::atan2(R(2, 1), -R(2, 0));
  return {alpha, beta, gamma};
}

GroupElement compose(const GroupElement& g2, const GroupElement& g1) {
  if (g2.kind != g1.kind) throw std::invalid_argument("compose: kind mismatch");
  if (g2.kind == GroupElement::Kind::SO2)
    return GroupElement::so2(g2.angle + g1.angle);
  auto e = matrix_to_euler(euler_to_matrix(g2.euler) * euler_to_matrix(g1.euler));
  return GroupElement::so3(e[0], e[1], e[2]);
}

}  // namespace orbit::group
