#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "orbitrec/common.hpp"

namespace orbit::basisgen {

/// Complex volume sampled on a product grid in spherical Fourier coordinates.
/// The radial grid excludes 0 (the rho^2 weight vanishes there anyway), so
/// the later division by rho is safe.
struct SphericalGridVolume {
  Eigen::VectorXd rho;     // n_rho nodes, uniform spacing drho
  double drho = 0.0;
  int n_phi1 = 0, n_phi2 = 0;
  Eigen::MatrixXcd values;      // n_rho x (n_phi1 * n_phi2)
  Eigen::VectorXd ang_weights;  // sin(phi1) dphi1 dphi2 per angular node

  int n_ang() const { return n_phi1 * n_phi2; }
  void write_csv(std::ostream& os) const;
  static SphericalGridVolume read_csv(std::istream& is);
};

/// Uniform spherical grid scaffold with zeroed values.
SphericalGridVolume make_grid(int n_rho, int n_phi1, int n_phi2,
                              double rho_max);

/// Random bandlimited volume: harmonic coefficients with the real-volume
/// conjugation symmetry, times smooth random radial profiles.
SphericalGridVolume synthetic_volume(int L, int S, int n_rho, int n_phi1,
                                     int n_phi2, double rho_max,
                                     uint64_t seed);

/// Separable volume f(rho, u) = z(rho) h(u); its cross-covariance kernel has
/// rank one.
SphericalGridVolume separable_volume(int n_rho, int n_phi1, int n_phi2,
                                     double rho_max, uint64_t seed);

/// Radial functions z_s on the rho grid, orthonormal under the
/// rho^2 drho quadrature.
struct RadialBasis {
  Eigen::VectorXd rho;
  double drho = 0.0;
  Eigen::MatrixXd z;  // n_rho x S

  int S() const { return int(z.cols()); }
  void write_csv(std::ostream& os) const;
  static RadialBasis read_csv(std::istream& is);
};

/// Leading-S eigenbasis of the weighted radial cross-covariance kernel;
/// the power of the projection onto span{z_1..z_s} x L2(S^2) is maximal for
/// every prefix. Throws when the kernel rank is below S.
RadialBasis radial_basis(const SphericalGridVolume& vol, int S);

/// Power of the projection of the volume onto the span of the basis.
double captured_power(const SphericalGridVolume& vol, const RadialBasis& basis);
double total_power(const SphericalGridVolume& vol);

}  // namespace orbit::basisgen
