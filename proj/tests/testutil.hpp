#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "orbitrec/common.hpp"

namespace testutil {

inline Eigen::VectorXd random_vec(int n, orbit::SeedStream& s) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = s.normal();
  return v;
}

/// Central finite-difference gradient.
inline Eigen::VectorXd fd_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (int i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    double fp = f(xp);
    xp[i] = x[i] - h;
    double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

/// Central finite-difference Hessian.
inline Eigen::MatrixXd fd_hessian(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h = 1e-4) {
  const int n = int(x.size());
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd xp = x;
  double f0 = f(x);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (i == j) {
        xp[i] = x[i] + h;
        double fp = f(xp);
        xp[i] = x[i] - h;
        double fm = f(xp);
        xp[i] = x[i];
        H(i, i) = (fp - 2 * f0 + fm) / (h * h);
      } else {
        xp[i] = x[i] + h;
        xp[j] = x[j] + h;
        double fpp = f(xp);
        xp[j] = x[j] - h;
        double fpm = f(xp);
        xp[i] = x[i] - h;
        double fmm = f(xp);
        xp[j] = x[j] + h;
        double fmp = f(xp);
        xp[i] = x[i];
        xp[j] = x[j];
        H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4 * h * h);
      }
    }
  }
  return H;
}

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x,
                           std::vector<double>& w) {
  x.assign(size_t(n), 0.0);
  w.assign(size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(orbit::kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int l = 2; l <= n; ++l) {
      double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[size_t(i)] = t;
    w[size_t(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace testutil
