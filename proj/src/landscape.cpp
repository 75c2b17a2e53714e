#include "orbitrec/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace orbit::landscape {

Eigen::MatrixXd procrustes_grad_s2(const Eigen::MatrixXd& theta,
                                   const Eigen::MatrixXd& theta_star) {
  Eigen::MatrixXd E = theta.transpose() * theta - theta_star.transpose() * theta_star;
  return (1.0 / 3.0) * theta * E;
}

Eigen::MatrixXd procrustes_hess_s2(const Eigen::MatrixXd& theta,
                                   const Eigen::MatrixXd& theta_star) {
  const int m = int(theta.cols());
  const int d = 3 * m;
  Eigen::MatrixXd E = theta.transpose() * theta - theta_star.transpose() * theta_star;
  Eigen::Matrix3d G = theta * theta.transpose();
  Eigen::MatrixXd H(d, d);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double v = theta(i, b) * theta(j, a);
          if (i == j) v += E(a, b);
          if (a == b) v += G(i, j);
          H(3 * a + i, 3 * b + j) = v / 3.0;
        }
  return H;
}

namespace {

double procrustes_s2(const Eigen::MatrixXd& theta,
                     const Eigen::MatrixXd& theta_star) {
  return (theta.transpose() * theta - theta_star.transpose() * theta_star)
             .squaredNorm() /
         12.0;
}

// Armijo backtracking descent with a negative-curvature escape when the
// gradient flattens out above the target value.
bool procrustes_descend(Eigen::MatrixXd& theta, const Eigen::MatrixXd& theta_star,
                        double target, int max_outer) {
  const double c1 = 1e-4;
  for (int outer = 0; outer < max_outer; ++outer) {
    double f = procrustes_s2(theta, theta_star);
    if (f <= target) return true;
    Eigen::MatrixXd g = procrustes_grad_s2(theta, theta_star);
    Eigen::MatrixXd dir;
    double gn = g.norm();
    if (gn > 1e-10) {
      dir = -g;
    } else {
      Eigen::MatrixXd H = procrustes_hess_s2(theta, theta_star);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
      if (es.eigenvalues()[0] >= -1e-12) return f <= target;  // true minimum
      Eigen::VectorXd v = es.eigenvectors().col(0);
      dir = Eigen::Map<const Eigen::MatrixXd>(v.data(), 3, theta.cols());
      if (procrustes_s2(theta + 1e-3 * dir, theta_star) > f) dir = -dir;
    }
    double step = 1.0;
    double slope = gn > 1e-10 ? -gn * gn : -1e-12;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::MatrixXd cand = theta + step * dir;
      if (procrustes_s2(cand, theta_star) <= f + c1 * step * slope) {
        theta = cand;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) return procrustes_s2(theta, theta_star) <= target;
  }
  return procrustes_s2(theta, theta_star) <= target;
}

}  // namespace

DescentSummary procrustes_descent_experiment(int m, int trials, uint64_t seed) {
  if (m < 3) throw std::invalid_argument("procrustes experiment: m >= 3");
  SeedStream root(seed);
  SeedStream star = root.split(0);
  Eigen::MatrixXd theta_star(3, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < 3; ++i) theta_star(i, j) = star.normal();
  DescentSummary out;
  out.trials = trials;
  for (int t = 0; t < trials; ++t) {
    SeedStream s = root.split(uint64_t(t) + 1);
    Eigen::MatrixXd theta(3, m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < 3; ++i) theta(i, j) = s.normal();
    procrustes_descend(theta, theta_star, 1e-10, 5000);
    double terminal = procrustes_s2(theta, theta_star);
    out.terminal_values.push_back(terminal);
    out.worst_terminal = std::max(out.worst_terminal, terminal);
    if (terminal <= 1e-10) ++out.successes;
  }
  return out;
}

nlohmann::json DescentSummary::to_json() const {
  nlohmann::json j;
  j["trials"] = trials;
  j["successes"] = successes;
  j["worst_terminal"] = worst_terminal;
  j["terminal_values"] = terminal_values;
  return j;
}

PhaseObjective mra_phase_objective(const Eigen::VectorXd& magnitudes,
                                   const Eigen::VectorXd& t, bool want_hessian) {
  const int L = int(magnitudes.size());
  if (t.size() != L)
    throw std::invalid_argument("mra_phase_objective: length mismatch");
  for (int l = 0; l < L; ++l)
    if (!(magnitudes[l] >= 0))
      throw std::invalid_argument("mra_phase_objective: magnitudes >= 0");
  Eigen::VectorXd rho = magnitudes.array().square();
  PhaseObjective out;
  out.gradient = Eigen::VectorXd::Zero(L);
  if (want_hessian) out.hessian = Eigen::MatrixXd::Zero(L, L);
  double value = 0.0;
  for (int l = 2; l <= L; ++l)
    for (int lp = 1; lp < l; ++lp) {
      int lpp = l - lp;
      double w = rho[l - 1] * rho[lp - 1] * rho[lpp - 1] / 8.0;
      if (w == 0.0 && !want_hessian) continue;
      // Reduce exactly so integer multiples of pi do not leak rounding noise
      // through sin at the certified point.
      double arg = std::remainder(t[l - 1] - t[lp - 1] - t[lpp - 1], kTwoPi);
      value += w * (1.0 - std::cos(arg));
      double sn = w * std::sin(arg);
      out.gradient[l - 1] += sn;
      out.gradient[lp - 1] -= sn;
      out.gradient[lpp - 1] -= sn;
      if (want_hessian) {
        double cs = w * std::cos(arg);
        int idx[3] = {l - 1, lp - 1, lpp - 1};
        double sgn[3] = {1.0, -1.0, -1.0};
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            out.hessian(idx[a], idx[b]) += cs * sgn[a] * sgn[b];
      }
    }
  out.value = value;
  return out;
}

namespace {

// Orthonormal basis of the complement of e = (1, 2, ..., L), built by
// Gram-Schmidt over the coordinate basis in fixed order.
Eigen::MatrixXd orbit_complement_basis(const Eigen::VectorXd& e) {
  const int L = int(e.size());
  Eigen::MatrixXd Q(L, L - 1);
  Eigen::VectorXd en = e.normalized();
  int col = 0;
  for (int i = 0; i < L && col < L - 1; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(L);
    v[i] = 1.0;
    v -= en.dot(v) * en;
    for (int c = 0; c < col; ++c) v -= Q.col(c).dot(v) * Q.col(c);
    double n = v.norm();
    if (n < 1e-10) continue;
    Q.col(col++) = v / n;
  }
  if (col != L - 1)
    throw std::runtime_error("orbit_complement_basis: degenerate basis");
  return Q;
}

Eigen::VectorXd orbit_tangent(int L) {
  Eigen::VectorXd e(L);
  for (int i = 0; i < L; ++i) e[i] = i + 1;
  return e;
}

}  // namespace

CriticalPointReport mra_spurious_search(int L,
                                        const std::vector<double>& kappa_grid,
                                        const std::vector<double>& delta_grid) {
  if (L < 30)
    throw HypothesisError("mra_spurious_search: construction requires L >= 30 "
                          "(got L = " + std::to_string(L) + ")");
  Eigen::VectorXd e = orbit_tangent(L);
  Eigen::MatrixXd Q = orbit_complement_basis(e);
  Eigen::VectorXd t_hat = Eigen::VectorXd::Zero(L);
  t_hat[0] = kPi;

  double best_margin = -std::numeric_limits<double>::infinity();
  CriticalPointReport best;
  for (double kappa : kappa_grid)
    for (double delta : delta_grid) {
      Eigen::VectorXd rho = Eigen::VectorXd::Ones(L);
      rho[1] = std::pow(double(L), kappa);
      rho[2] = delta;
      Eigen::VectorXd r = rho.array().sqrt();
      PhaseObjective obj = mra_phase_objective(r, t_hat, true);
      Eigen::MatrixXd Hp = Q.transpose() * obj.hessian * Q;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hp);
      double lmin = es.eigenvalues()[0];
      double lmax = es.eigenvalues()[L - 2];
      double margin = lmin - 1e-9 * std::abs(lmax);
      CriticalPointReport rep;
      rep.point = t_hat;
      rep.value = obj.value;
      rep.gradient_norm = obj.gradient.norm();
      rep.projected_spectrum = es.eigenvalues();
      rep.null_residual =
          (obj.hessian * e).norm() / (obj.hessian.norm() * e.norm());
      rep.kappa = kappa;
      rep.delta = delta;
      bool ok = rep.gradient_norm <= 1e-10 && lmin > 1e-9 * std::abs(lmax) &&
                obj.value > 0;
      if (ok) {
        rep.classification = "spurious-min";
        return rep;
      }
      if (margin > best_margin) {
        best_margin = margin;
        best = rep;
      }
    }
  throw SearchExhaustedError(
      "mra_spurious_search: no (kappa, delta) grid point certified; best "
      "margin " + std::to_string(best_margin) + " at kappa=" +
      std::to_string(best.kappa) + " delta=" + std::to_string(best.delta));
}

nlohmann::json CriticalPointReport::to_json() const {
  nlohmann::json j;
  std::vector<double> pt(point.data(), point.data() + point.size());
  std::vector<double> sp(projected_spectrum.data(),
                         projected_spectrum.data() + projected_spectrum.size());
  j["point"] = pt;
  j["value"] = value;
  j["gradient_norm"] = gradient_norm;
  j["projected_spectrum"] = sp;
  j["null_residual"] = null_residual;
  j["classification"] = classification;
  if (kappa != 0.0 || delta != 0.0) {
    j["kappa"] = kappa;
    j["delta"] = delta;
  }
  return j;
}

namespace {

struct ChartObjective {
  // generic value/gradient/Hessian in chart coordinates
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> tangent;  // orbit dir
  double scale = 1.0;
};

ChartObjective make_chart_objective(const VarietyChart& chart) {
  const auto& model = chart.model;
  if (model.kind != models::ModelKind::mra)
    throw std::invalid_argument("minimize_sk_on_variety: mra charts only");
  const int L = model.L;
  ChartObjective co;
  if (chart.k == 2) {
    Eigen::VectorXd rho_star(L);
    for (int l = 1; l <= L; ++l) {
      double a = chart.theta_star[model.mra_offset(l, 1)];
      double b = chart.theta_star[model.mra_offset(l, 2)];
      rho_star[l - 1] = a * a + b * b;
    }
    co.scale = std::max(1.0, rho_star.squaredNorm());
    co.value = [L, rho_star](const Eigen::VectorXd& x) {
      double v = 0;
      for (int l = 0; l < L; ++l) {
        double rho = x[2 * l] * x[2 * l] + x[2 * l + 1] * x[2 * l + 1];
        v += (rho - rho_star[l]) * (rho - rho_star[l]) / 8.0;
      }
      return v;
    };
    co.gradient = [L, rho_star](const Eigen::VectorXd& x) {
      Eigen::VectorXd g(2 * L);
      for (int l = 0; l < L; ++l) {
        double rho = x[2 * l] * x[2 * l] + x[2 * l + 1] * x[2 * l + 1];
        double c = 0.5 * (rho - rho_star[l]);
        g[2 * l] = c * x[2 * l];
        g[2 * l + 1] = c * x[2 * l + 1];
      }
      return g;
    };
    co.hessian = [L, rho_star](const Eigen::VectorXd& x) {
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * L, 2 * L);
      for (int l = 0; l < L; ++l) {
        double a = x[2 * l], b = x[2 * l + 1];
        double rho = a * a + b * b;
        double c = 0.5 * (rho - rho_star[l]);
        H(2 * l, 2 * l) = c + a * a;
        H(2 * l + 1, 2 * l + 1) = c + b * b;
        H(2 * l, 2 * l + 1) = H(2 * l + 1, 2 * l) = a * b;
      }
      return H;
    };
    co.tangent = [L](const Eigen::VectorXd& x) {
      Eigen::VectorXd t(2 * L);
      for (int l = 0; l < L; ++l) {
        t[2 * l] = (l + 1) * x[2 * l + 1];
        t[2 * l + 1] = -(l + 1) * x[2 * l];
      }
      return t;
    };
    return co;
  }
  if (chart.k != 3)
    throw std::invalid_argument("minimize_sk_on_variety: k in {2, 3}");
  Eigen::VectorXd r_star(L);
  for (int l = 1; l <= L; ++l) {
    double a = chart.theta_star[model.mra_offset(l, 1)];
    double b = chart.theta_star[model.mra_offset(l, 2)];
    r_star[l - 1] = std::hypot(a, b);
  }
  Eigen::VectorXd rho = r_star.array().square();
  double scale = 0;
  for (int l = 2; l <= L; ++l)
    for (int lp = 1; lp < l; ++lp)
      scale += rho[l - 1] * rho[lp - 1] * rho[l - lp - 1] / 8.0;
  co.scale = std::max(1.0, scale);
  co.value = [r_star](const Eigen::VectorXd& t) {
    return mra_phase_objective(r_star, t, false).value;
  };
  co.gradient = [r_star](const Eigen::VectorXd& t) {
    return mra_phase_objective(r_star, t, false).gradient;
  };
  co.hessian = [r_star](const Eigen::VectorXd& t) {
    return mra_phase_objective(r_star, t, true).hessian;
  };
  co.tangent = [L](const Eigen::VectorXd&) { return orbit_tangent(L); };
  return co;
}

}  // namespace

CriticalPointReport minimize_sk_on_variety(const VarietyChart& chart,
                                           const Eigen::VectorXd& init,
                                           const StepPolicy& policy) {
  ChartObjective co = make_chart_objective(chart);
  Eigen::VectorXd x = init;
  bool converged = false;
  for (int it = 0; it < policy.max_iters; ++it) {
    Eigen::VectorXd g = co.gradient(x);
    double gn = g.norm();
    if (gn <= policy.grad_tol) {
      converged = true;
      break;
    }
    double f = co.value(x);
    double step = policy.init_step;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::VectorXd cand = x - step * g;
      if (co.value(cand) <= f - policy.armijo_c * step * gn * gn) {
        x = cand;
        moved = true;
        break;
      }
      step *= policy.shrink;
    }
    if (!moved) break;  // stalled to rounding
  }
  CriticalPointReport rep;
  rep.point = x;
  rep.value = co.value(x);
  rep.gradient_norm = co.gradient(x).norm();
  Eigen::MatrixXd H = co.hessian(x);
  Eigen::VectorXd tangent = co.tangent(x);
  double tn = tangent.norm();
  rep.null_residual =
      tn > 0 && H.norm() > 0 ? (H * tangent).norm() / (H.norm() * tn) : 0.0;
  // Project the Hessian onto the orthogonal complement of the orbit tangent.
  const int n = int(x.size());
  Eigen::MatrixXd Q;
  if (tn > 1e-12) {
    Q = orbit_complement_basis(tangent);
  } else {
    Q = Eigen::MatrixXd::Identity(n, n);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q.transpose() * H * Q);
  rep.projected_spectrum = es.eigenvalues();
  const double lmin = es.eigenvalues()[0];
  const double lmax = std::abs(es.eigenvalues()[es.eigenvalues().size() - 1]);
  const double pd_tol = 1e-9 * std::max(lmax, 1e-30);
  if (!converged && rep.gradient_norm > policy.grad_tol) {
    rep.classification = "unresolved";
  } else if (rep.value <= 1e-10 * co.scale) {
    rep.classification = "global-min";
  } else if (lmin > pd_tol) {
    rep.classification = "spurious-min";
  } else if (lmin < -pd_tol) {
    rep.classification = "saddle";
  } else {
    rep.classification = "unresolved";
  }
  return rep;
}

}  // namespace orbit::landscape
