#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace orbit::harmonics {

using cplx = std::complex<double>;

/// Index tuple of a Clebsch-Gordan coefficient <l,m; lp,mp | lpp,mpp>.
/// The coefficient is defined as 0 whenever mpp != m+mp, any |order| exceeds
/// its frequency, or the triangle window |l-lp| <= lpp <= l+lp fails.
struct CGIndex {
  int l, lp, lpp;
  int m, mp, mpp;
};

/// log(n!) (cached) and exact n! as a double for n <= 18.
double log_factorial(int n);
double exact_factorial(int n);

/// Associated Legendre P_lm(x), Rodrigues normalization without the
/// Condon-Shortley phase; valid for -l <= m <= l.
double assoc_legendre(int l, int m, double x);

/// Ordinary Legendre polynomial P_l(x) (equals the (0,0) rotation-matrix
/// element at polar angle acos(x)).
double legendre_p(int l, double x);

/// Closed form of P_lm at x = 0 (parity-killed for odd l+m).
double assoc_legendre_at_zero(int l, int m);

/// Complex spherical harmonic y_lm(phi1, phi2), phi1 the latitude.
cplx sph_harm(int l, int m, double phi1, double phi2);

/// Clebsch-Gordan coefficient; total on all integer tuples.
double clebsch_gordan(const CGIndex& idx);

/// Sufficient condition for clebsch_gordan(idx) != 0 (test guard only):
/// requires the domain window plus l >= lp, l >= lpp+1, |mp| in {lp-1, lp},
/// |mpp| in {lpp-1, lpp}, excluding the simultaneous case
/// |m| = l-1, |mp| = lp-1, |mpp| = lpp-1, lp = lpp.
bool cg_nonvanishing(const CGIndex& idx);

/// Central-slice coefficient p_lm of the tomographic projection: the value
/// of y_lm on the equator divided by the planar angular factor. Zero for odd
/// l+m; satisfies p_{l,-m} = (-1)^m p_{lm}.
double fourier_slice_coeff(int l, int m);

/// Wigner rotation block at frequency l, rows/columns indexed q,m in [-l,l].
struct WignerBlock {
  int l = 0;
  Eigen::MatrixXcd entries;  // (2l+1) x (2l+1)

  cplx operator()(int q, int m) const { return entries(q + l, m + l); }
};

/// Real rotation kernel d^l_{qm}(beta) of the z-y-z factorization.
double wigner_little_d(int l, int q, int m, double beta);

/// Full block D^l(alpha,beta,gamma) = e^{-i q alpha} d^l_{qm}(beta) e^{-i m gamma}.
WignerBlock wigner_d(int l, const std::array<double, 3>& euler);

}  // namespace orbit::harmonics
