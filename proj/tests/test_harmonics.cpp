#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "orbitrec/common.hpp"
#include "orbitrec/harmonics.hpp"
#include "testutil.hpp"

using namespace orbit;
using namespace orbit::harmonics;

TEST_CASE("associated Legendre: base cases and parity at zero") {
  CHECK(assoc_legendre(0, 0, 0.37) == doctest::Approx(1.0));
  CHECK(assoc_legendre(2, 0, 0.0) == doctest::Approx(-0.5));
  // odd l+m vanishes at x = 0
  for (int l = 0; l <= 10; ++l)
    for (int m = -l; m <= l; ++m)
      if ((l + m) % 2 != 0) CHECK(assoc_legendre(l, m, 0.0) == 0.0);
  CHECK_THROWS_AS(assoc_legendre(2, 3, 0.0), std::domain_error);
  CHECK_THROWS_AS(assoc_legendre(2, 0, 1.5), std::domain_error);
}

TEST_CASE("associated Legendre matches the closed form at zero, l <= 20") {
  for (int l = 0; l <= 20; ++l)
    for (int m = -l; m <= l; ++m) {
      double expect = assoc_legendre_at_zero(l, m);
      double got = assoc_legendre(l, m, 0.0);
      if (expect == 0.0)
        CHECK(got == 0.0);
      else
        CHECK(got == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("spherical harmonics: normalization, conjugation, orthonormality") {
  CHECK(sph_harm(0, 0, 0.9, 2.2).real() ==
        doctest::Approx(1.0 / std::sqrt(4.0 * kPi)));
  CHECK(sph_harm(0, 0, 0.9, 2.2).imag() == doctest::Approx(0.0));

  SeedStream s(3);
  for (int t = 0; t < 50; ++t) {
    int l = int(s.uniform() * 8);
    int m = -l + int(s.uniform() * (2 * l + 1));
    double p1 = s.uniform() * kPi, p2 = s.uniform() * kTwoPi;
    auto lhs = std::conj(sph_harm(l, m, p1, p2));
    auto rhs = (m % 2 == 0 ? 1.0 : -1.0) * sph_harm(l, -m, p1, p2);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }

  // product quadrature: Gauss-Legendre in cos(phi1) x uniform phi2
  std::vector<double> gx, gw;
  testutil::gauss_legendre(24, gx, gw);
  const int nphi = 32;
  for (int l = 0; l <= 5; ++l)
    for (int lp = 0; lp <= 5; ++lp)
      for (int m = -l; m <= l; ++m)
        for (int mp = -lp; mp <= lp; ++mp) {
          std::complex<double> acc = 0;
          for (size_t i = 0; i < gx.size(); ++i) {
            double phi1 = std::acos(gx[i]);
            for (int j = 0; j < nphi; ++j) {
              double phi2 = kTwoPi * j / nphi;
              acc += gw[i] * (kTwoPi / nphi) * sph_harm(l, m, phi1, phi2) *
                     std::conj(sph_harm(lp, mp, phi1, phi2));
            }
          }
          double expect = (l == lp && m == mp) ? 1.0 : 0.0;
          CHECK(std::abs(acc - expect) < 1e-8);
        }
}

TEST_CASE("Clebsch-Gordan: spot values and selection rules") {
  CHECK(clebsch_gordan({0, 0, 0, 0, 0, 0}) == 1.0);
  CHECK(clebsch_gordan({3, 2, 2, 2, -1, 1}) == 0.0);
  // zero outside the domain window
  CHECK(clebsch_gordan({1, 1, 3, 0, 0, 0}) == 0.0);
  CHECK(clebsch_gordan({2, 1, 1, 1, 1, 1}) == 0.0);  // mpp != m+mp
  CHECK(clebsch_gordan({1, 1, 1, 2, -1, 1}) == 0.0); // |m| > l
}

TEST_CASE("Clebsch-Gordan sign symmetry over l,l',l'' <= 8") {
  for (int l = 0; l <= 8; ++l)
    for (int lp = 0; lp <= 8; ++lp)
      for (int lpp = std::abs(l - lp); lpp <= std::min(8, l + lp); ++lpp)
        for (int m = -l; m <= l; ++m)
          for (int mp = -lp; mp <= lp; ++mp) {
            int mpp = m + mp;
            if (std::abs(mpp) > lpp) continue;
            double a = clebsch_gordan({l, lp, lpp, m, mp, mpp});
            double b = clebsch_gordan({l, lp, lpp, -m, -mp, -mpp});
            double sgn = (l + lp + lpp) % 2 == 0 ? 1.0 : -1.0;
            CHECK(std::abs(a - sgn * b) < 1e-12);
          }
}

TEST_CASE("nonvanishing guard: conditions and consistency with the values") {
  CHECK(cg_nonvanishing({5, 2, 4, 5, -2, 3}));
  CHECK(std::abs(clebsch_gordan({5, 2, 4, 5, -2, 3})) > 0);
  // third clause exclusion
  CHECK_FALSE(cg_nonvanishing({3, 2, 2, 2, -1, 1}));
  // guard = true implies a nonzero coefficient, random probe
  SeedStream s(5);
  int hits = 0;
  while (hits < 1000) {
    int l = 1 + int(s.uniform() * 8);
    int lp = int(s.uniform() * (l + 1));
    int lpp = int(s.uniform() * l);
    if (lpp < std::abs(l - lp) || lpp > l + lp) continue;
    int mp = (s.uniform() < 0.5 ? 1 : -1) * (s.uniform() < 0.5 ? lp : lp - 1);
    int mpp = (s.uniform() < 0.5 ? 1 : -1) * (s.uniform() < 0.5 ? lpp : lpp - 1);
    int m = mpp - mp;
    CGIndex idx{l, lp, lpp, m, mp, mpp};
    if (!cg_nonvanishing(idx)) continue;
    ++hits;
    CHECK(std::abs(clebsch_gordan(idx)) > 0);
  }
}

TEST_CASE("exhaustive selection rule: nonzero implies window, l <= 8") {
  for (int l = 0; l <= 8; ++l)
    for (int lp = 0; lp <= 8; ++lp)
      for (int lpp = 0; lpp <= 8; ++lpp)
        for (int m = -l; m <= l; ++m)
          for (int mp = -lp; mp <= lp; ++mp)
            for (int mpp = -lpp; mpp <= lpp; ++mpp) {
              double v = clebsch_gordan({l, lp, lpp, m, mp, mpp});
              if (v != 0.0) {
                CHECK(mpp == m + mp);
                CHECK(lpp >= std::abs(l - lp));
                CHECK(lpp <= l + lp);
              }
            }
}

TEST_CASE("slice coefficients: parity, base value, sign symmetry") {
  CHECK(fourier_slice_coeff(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  for (int l = 0; l <= 10; ++l)
    for (int m = -l; m <= l; ++m)
      if ((l + m) % 2 != 0) CHECK(fourier_slice_coeff(l, m) == 0.0);
  for (int l = 0; l <= 10; ++l)
    for (int m = 0; m <= l; ++m) {
      if ((l + m) % 2 != 0) continue;
      double p = fourier_slice_coeff(l, m);
      double pn = fourier_slice_coeff(l, -m);
      CHECK(pn == doctest::Approx((m % 2 == 0 ? 1.0 : -1.0) * p));
    }
  // agreement with the equatorial harmonic value
  for (int l = 0; l <= 6; ++l)
    for (int m = -l; m <= l; ++m) {
      auto y = sph_harm(l, m, kPi / 2, 0.7);
      std::complex<double> b =
          std::polar(1.0 / std::sqrt(kTwoPi), 0.7 * m);
      CHECK(std::abs(y - fourier_slice_coeff(l, m) * b) < 1e-12);
    }
}

TEST_CASE("Wigner blocks: identity, unitarity at random angles") {
  auto D0 = wigner_d(0, {0.3, 0.9, 1.2});
  CHECK(std::abs(D0(0, 0) - 1.0) < 1e-15);
  auto I = wigner_d(7, {0, 0, 0});
  CHECK((I.entries - Eigen::MatrixXcd::Identity(15, 15)).cwiseAbs().maxCoeff() <
        1e-13);
  SeedStream s(9);
  for (int t = 0; t < 100; ++t) {
    int l = int(s.uniform() * 13);
    std::array<double, 3> e{s.uniform() * kTwoPi, s.uniform() * kPi,
                            s.uniform() * kTwoPi};
    auto D = wigner_d(l, e);
    Eigen::MatrixXcd err = D.entries.adjoint() * D.entries -
                           Eigen::MatrixXcd::Identity(2 * l + 1, 2 * l + 1);
    CHECK(err.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("polar rotation kernel equals the Legendre polynomial at (0,0)") {
  SeedStream s(13);
  for (int t = 0; t < 40; ++t) {
    int l = int(s.uniform() * 13);
    double beta = s.uniform() * kPi;
    CHECK(std::abs(wigner_little_d(l, 0, 0, beta) -
                   legendre_p(l, std::cos(beta))) < 1e-12);  // l <= 20
  }
}
