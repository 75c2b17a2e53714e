#include "orbitrec/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "orbitrec/common.hpp"

namespace orbit::harmonics {

namespace {

constexpr int kMaxFact = 512;

const std::vector<long double>& log_fact_table_ld() {
  static const std::vector<long double> t = [] {
    std::vector<long double> v(kMaxFact + 1, 0.0L);
    for (int n = 1; n <= kMaxFact; ++n) v[n] = v[n - 1] + logl((long double)n);
    return v;
  }();
  return t;
}

const std::vector<double>& log_fact_table() {
  static const std::vector<double> t = [] {
    const auto& ld = log_fact_table_ld();
    std::vector<double> v(ld.begin(), ld.end());
    return v;
  }();
  return t;
}

long double log_factorial_ld(int n) { return log_fact_table_ld()[size_t(n)]; }

// n! is exact in a double up to n = 18 (19! exceeds 2^53).
const std::array<double, 19>& exact_fact_table() {
  static const std::array<double, 19> t = [] {
    std::array<double, 19> v{};
    v[0] = 1.0;
    for (int n = 1; n <= 18; ++n) v[n] = v[n - 1] * n;
    return v;
  }();
  return t;
}

}  // namespace

double log_factorial(int n) {
  if (n < 0 || n > kMaxFact) throw std::domain_error("log_factorial: bad n");
  return log_fact_table()[n];
}

double exact_factorial(int n) {
  if (n < 0 || n > 18) throw std::domain_error("exact_factorial: n > 18");
  return exact_fact_table()[n];
}

double assoc_legendre(int l, int m, double x) {
  if (l < 0 || std::abs(m) > l)
    throw std::domain_error("assoc_legendre: require |m| <= l");
  if (std::abs(x) > 1.0)
    throw std::domain_error("assoc_legendre: require |x| <= 1");
  if (m < 0) {
    // P_{l,-|m|} = (-1)^{|m|} (l-|m|)!/(l+|m|)! P_{l,|m|}
    int ma = -m;
    double ratio = std::exp(log_factorial(l - ma) - log_factorial(l + ma));
    double sgn = (ma % 2 == 0) ? 1.0 : -1.0;
    return sgn * ratio * assoc_legendre(l, ma, x);
  }
  // Upward recurrence in l at fixed m, seeded by the double-factorial case.
  double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = 1.0;
  for (int i = 1; i <= m; ++i) pmm *= (2.0 * i - 1.0) * somx2;
  if (l == m) return pmm;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pmmp1;
  double pll = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

double legendre_p(int l, double x) { return assoc_legendre(l, 0, x); }

double assoc_legendre_at_zero(int l, int m) {
  if (l < 0 || std::abs(m) > l)
    throw std::domain_error("assoc_legendre_at_zero: require |m| <= l");
  if ((l + m) % 2 != 0) return 0.0;
  int h = (l + m) / 2;
  double logmag = log_factorial(l) - log_factorial(h) - log_factorial(l - h) -
                  l * std::log(2.0) - log_factorial(l) + log_factorial(l + m);
  double sgn = (((l - m) / 2) % 2 == 0) ? 1.0 : -1.0;
  return sgn * std::exp(logmag);
}

cplx sph_harm(int l, int m, double phi1, double phi2) {
  if (l < 0 || std::abs(m) > l)
    throw std::domain_error("sph_harm: require |m| <= l");
  double lognorm = 0.5 * (std::log((2.0 * l + 1.0) / (4.0 * kPi)) +
                          log_factorial(l - m) - log_factorial(l + m));
  double sgn = (m % 2 == 0) ? 1.0 : -1.0;
  double mag = sgn * std::exp(lognorm) * assoc_legendre(l, m, std::cos(phi1));
  return mag * std::polar(1.0, m * phi2);
}

double clebsch_gordan(const CGIndex& idx) {
  const int l = idx.l, lp = idx.lp, lpp = idx.lpp;
  const int m = idx.m, mp = idx.mp, mpp = idx.mpp;
  if (l < 0 || lp < 0 || lpp < 0) return 0.0;
  if (mpp != m + mp) return 0.0;
  if (std::abs(m) > l || std::abs(mp) > lp || std::abs(mpp) > lpp) return 0.0;
  if (lpp < std::abs(l - lp) || lpp > l + lp) return 0.0;

  const int kmin = std::max({0, lp - lpp - m, l - lpp + mp});
  const int kmax = std::min({l + lp - lpp, l - m, lp + mp});
  if (kmin > kmax) return 0.0;

  // Factorial arguments of the k-sum terms.
  const auto args = [&](int k) {
    return std::array<int, 6>{k,           l + lp - lpp - k, l - m - k,
                              lp + mp - k, lpp - lp + m + k, lpp - l - mp + k};
  };
  // Direct reciprocals keep exact cancellations (e.g. C^{3,2,2}_{2,-1,1})
  // exact when the denominators are exactly representable.
  bool direct = true;
  for (int k = kmin; k <= kmax && direct; ++k)
    for (int a : args(k))
      if (a > 18) direct = false;

  double sum = 0.0, comp = 0.0;  // Kahan
  for (int k = kmin; k <= kmax; ++k) {
    double term;
    if (direct) {
      double den = 1.0;
      for (int a : args(k)) den *= exact_factorial(a);
      term = 1.0 / den;
    } else {
      double logden = 0.0;
      for (int a : args(k)) logden += log_factorial(a);
      term = std::exp(-logden);
    }
    if (k % 2 != 0) term = -term;
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  if (sum == 0.0) return 0.0;

  double logpre =
      0.5 * (std::log(2.0 * lpp + 1.0) + log_factorial(l + lp - lpp) +
             log_factorial(l + lpp - lp) + log_factorial(lp + lpp - l) -
             log_factorial(l + lp + lpp + 1) + log_factorial(l - m) +
             log_factorial(l + m) + log_factorial(lp - mp) +
             log_factorial(lp + mp) + log_factorial(lpp - mpp) +
             log_factorial(lpp + mpp));
  return std::exp(logpre) * sum;
}

bool cg_nonvanishing(const CGIndex& idx) {
  const int l = idx.l, lp = idx.lp, lpp = idx.lpp;
  const int m = idx.m, mp = idx.mp, mpp = idx.mpp;
  if (mpp != m + mp) return false;
  if (std::abs(m) > l || std::abs(mp) > lp || std::abs(mpp) > lpp) return false;
  if (lpp < std::abs(l - lp) || lpp > l + lp) return false;
  if (!(l >= lp && l >= lpp + 1)) return false;
  int am = std::abs(m), amp = std::abs(mp), ampp = std::abs(mpp);
  if (!(amp == lp || amp == lp - 1)) return false;
  if (!(ampp == lpp || ampp == lpp - 1)) return false;
  if (am == l - 1 && amp == lp - 1 && ampp == lpp - 1 && lp == lpp)
    return false;
  return true;
}

double fourier_slice_coeff(int l, int m) {
  if (l < 0 || std::abs(m) > l)
    throw std::domain_error("fourier_slice_coeff: require |m| <= l");
  if ((l + m) % 2 != 0) return 0.0;
  int h = (l + m) / 2;
  double logmag = 0.5 * std::log((2.0 * l + 1.0) / 2.0) - l * std::log(2.0) -
                  log_factorial(l) + log_factorial(l) - log_factorial(h) -
                  log_factorial(l - h) +
                  0.5 * (log_factorial(l - m) + log_factorial(l + m));
  double sgn = (h % 2 == 0) ? 1.0 : -1.0;
  return sgn * std::exp(logmag);
}

double wigner_little_d(int l, int q, int m, double beta) {
  if (l < 0 || std::abs(q) > l || std::abs(m) > l)
    throw std::domain_error("wigner_little_d: require |q|,|m| <= l");
  const long double c = std::cos(0.5L * (long double)beta);
  const long double s = std::sin(0.5L * (long double)beta);
  const long double logpre =
      0.5L * (log_factorial_ld(l + q) + log_factorial_ld(l - q) +
              log_factorial_ld(l + m) + log_factorial_ld(l - m));
  const int smin = std::max(0, m - q);
  const int smax = std::min(l + m, l - q);
  // Alternating sum: extended precision keeps the cancellation below 1e-13
  // through l ~ 24.
  long double sum = 0.0L;
  for (int k = smin; k <= smax; ++k) {
    int pc = 2 * l + m - q - 2 * k;  // power of cos(beta/2)
    int ps = q - m + 2 * k;          // power of sin(beta/2)
    long double logden = log_factorial_ld(l + m - k) + log_factorial_ld(k) +
                         log_factorial_ld(q - m + k) + log_factorial_ld(l - q - k);
    long double mag = expl(logpre - logden) * powl(c, pc) * powl(s, ps);
    sum += ((q - m + k) % 2 == 0) ? mag : -mag;
  }
  return double(sum);
}

WignerBlock wigner_d(int l, const std::array<double, 3>& euler) {
  if (l < 0) throw std::domain_error("wigner_d: l >= 0");
  const int n = 2 * l + 1;
  WignerBlock blk;
  blk.l = l;
  blk.entries.resize(n, n);
  Eigen::MatrixXd little(n, n);
  for (int q = -l; q <= l; ++q)
    for (int m = -l; m <= l; ++m)
      little(q + l, m + l) = wigner_little_d(l, q, m, euler[1]);
  for (int q = -l; q <= l; ++q) {
    cplx ea = std::polar(1.0, -q * euler[0]);
    for (int m = -l; m <= l; ++m)
      blk.entries(q + l, m + l) =
          ea * little(q + l, m + l) * std::polar(1.0, -m * euler[2]);
  }
  return blk;
}

}  // namespace orbit::harmonics
