#include "orbitrec/basisgen.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "orbitrec/harmonics.hpp"

namespace orbit::basisgen {

SphericalGridVolume make_grid(int n_rho, int n_phi1, int n_phi2,
                              double rho_max) {
  if (n_rho < 2 || n_phi1 < 2 || n_phi2 < 2)
    throw std::invalid_argument("make_grid: grid sizes >= 2");
  SphericalGridVolume v;
  v.drho = rho_max / n_rho;
  v.rho.resize(n_rho);
  for (int i = 0; i < n_rho; ++i) v.rho[i] = (i + 1) * v.drho;
  v.n_phi1 = n_phi1;
  v.n_phi2 = n_phi2;
  v.values = Eigen::MatrixXcd::Zero(n_rho, n_phi1 * n_phi2);
  v.ang_weights.resize(n_phi1 * n_phi2);
  const double dphi1 = kPi / n_phi1, dphi2 = kTwoPi / n_phi2;
  for (int a = 0; a < n_phi1; ++a) {
    double phi1 = (a + 0.5) * dphi1;  // midpoint rule keeps sin > 0
    for (int b = 0; b < n_phi2; ++b)
      v.ang_weights[a * n_phi2 + b] = std::sin(phi1) * dphi1 * dphi2;
  }
  return v;
}

namespace {

double angular_phi1(const SphericalGridVolume& v, int idx) {
  return (idx / v.n_phi2 + 0.5) * kPi / v.n_phi1;
}
double angular_phi2(const SphericalGridVolume& v, int idx) {
  return (idx % v.n_phi2) * kTwoPi / v.n_phi2;
}

// Smooth random radial profile, decaying at the grid edge.
Eigen::VectorXd random_radial(const Eigen::VectorXd& rho, SeedStream& s) {
  Eigen::VectorXd z(rho.size());
  double a1 = s.normal(), a2 = s.normal(), a3 = s.normal();
  double width = 0.3 + 0.5 * s.uniform();
  double rmax = rho[rho.size() - 1];
  for (int i = 0; i < rho.size(); ++i) {
    double x = rho[i] / rmax;
    z[i] = (a1 + a2 * x + a3 * x * x) * std::exp(-x * x / (2 * width * width));
  }
  return z;
}

}  // namespace

SphericalGridVolume synthetic_volume(int L, int S, int n_rho, int n_phi1,
                                     int n_phi2, double rho_max,
                                     uint64_t seed) {
  SphericalGridVolume v = make_grid(n_rho, n_phi1, n_phi2, rho_max);
  SeedStream stream{seed};
  // Radial profiles per s.
  std::vector<Eigen::VectorXd> zs;
  for (int s = 0; s < S; ++s) zs.push_back(random_radial(v.rho, stream));
  // Harmonic coefficients with the real-volume symmetry
  // u_{l,-m} = (-1)^{l+m} conj(u_{l,m}).
  for (int l = 0; l <= L; ++l)
    for (int s = 0; s < S; ++s) {
      std::vector<std::complex<double>> u(size_t(2 * l + 1));
      for (int m = 0; m <= l; ++m) {
        double re = stream.normal(), im = m == 0 ? 0.0 : stream.normal();
        if (m == 0 && l % 2 == 1) {  // parity forces pure imaginary
          u[size_t(l)] = {0.0, stream.normal()};
        } else if (m == 0) {
          u[size_t(l)] = {re, 0.0};
        } else {
          u[size_t(l + m)] = {re, im};
          double sg = (l + m) % 2 == 0 ? 1.0 : -1.0;
          u[size_t(l - m)] = sg * std::conj(u[size_t(l + m)]);
        }
      }
      for (int ia = 0; ia < v.n_ang(); ++ia) {
        double p1 = angular_phi1(v, ia), p2 = angular_phi2(v, ia);
        std::complex<double> ang = 0;
        for (int m = -l; m <= l; ++m)
          ang += u[size_t(m + l)] * harmonics::sph_harm(l, m, p1, p2);
        for (int ir = 0; ir < n_rho; ++ir)
          v.values(ir, ia) += zs[size_t(s)][ir] * ang;
      }
    }
  return v;
}

SphericalGridVolume separable_volume(int n_rho, int n_phi1, int n_phi2,
                                     double rho_max, uint64_t seed) {
  SphericalGridVolume v = make_grid(n_rho, n_phi1, n_phi2, rho_max);
  SeedStream stream{seed};
  Eigen::VectorXd z = random_radial(v.rho, stream);
  Eigen::VectorXcd h(v.n_ang());
  for (int ia = 0; ia < v.n_ang(); ++ia) {
    double p1 = angular_phi1(v, ia), p2 = angular_phi2(v, ia);
    h[ia] = harmonics::sph_harm(0, 0, p1, p2) +
            0.7 * harmonics::sph_harm(2, 0, p1, p2) +
            0.3 * (harmonics::sph_harm(1, 1, p1, p2) -
                   harmonics::sph_harm(1, -1, p1, p2));
  }
  for (int ir = 0; ir < n_rho; ++ir) v.values.row(ir) = z[ir] * h.transpose();
  return v;
}

RadialBasis radial_basis(const SphericalGridVolume& vol, int S) {
  const int n = int(vol.rho.size());
  if (S < 1 || S > n)
    throw std::invalid_argument("radial_basis: need 1 <= S <= n_rho");
  // Angular cross-covariance C(rho_i, rho_j), real for real-volume symmetry.
  Eigen::MatrixXcd C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      std::complex<double> acc = 0;
      for (int ia = 0; ia < vol.n_ang(); ++ia)
        acc += vol.values(i, ia) * std::conj(vol.values(j, ia)) *
               vol.ang_weights[ia];
      C(i, j) = acc;
      C(j, i) = std::conj(acc);
    }
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      K(i, j) = C(i, j).real() * vol.rho[i] * vol.rho[j] * vol.drho;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  // Ascending order; check requested rank before flipping.
  const double lmax = std::max(es.eigenvalues()[n - 1], 0.0);
  int rank = 0;
  for (int i = 0; i < n; ++i)
    if (es.eigenvalues()[i] > 1e-12 * lmax) ++rank;
  if (rank < S)
    throw std::runtime_error("radial_basis: kernel rank " +
                             std::to_string(rank) + " below requested S = " +
                             std::to_string(S));
  RadialBasis basis;
  basis.rho = vol.rho;
  basis.drho = vol.drho;
  basis.z.resize(n, S);
  const double inv_sqrt_drho = 1.0 / std::sqrt(vol.drho);
  for (int s = 0; s < S; ++s) {
    Eigen::VectorXd v = es.eigenvectors().col(n - 1 - s);
    // Sign convention: first entry of meaningful size positive.
    double lead = 0.0;
    for (int i = 0; i < n; ++i)
      if (std::abs(v[i]) > 1e-12) {
        lead = v[i];
        break;
      }
    if (lead < 0) v = -v;
    for (int i = 0; i < n; ++i)
      basis.z(i, s) = v[i] / vol.rho[i] * inv_sqrt_drho;
  }
  return basis;
}

double captured_power(const SphericalGridVolume& vol, const RadialBasis& basis) {
  if (basis.rho.size() != vol.rho.size())
    throw std::invalid_argument("captured_power: incompatible grids");
  double power = 0.0;
  for (int s = 0; s < basis.S(); ++s) {
    for (int ia = 0; ia < vol.n_ang(); ++ia) {
      std::complex<double> h = 0;
      for (int i = 0; i < vol.rho.size(); ++i)
        h += vol.values(i, ia) * basis.z(i, s) * vol.rho[i] * vol.rho[i] *
             vol.drho;
      power += std::norm(h) * vol.ang_weights[ia];
    }
  }
  return power;
}

double total_power(const SphericalGridVolume& vol) {
  double power = 0.0;
  for (int ia = 0; ia < vol.n_ang(); ++ia)
    for (int i = 0; i < vol.rho.size(); ++i)
      power += std::norm(vol.values(i, ia)) * vol.rho[i] * vol.rho[i] *
               vol.drho * vol.ang_weights[ia];
  return power;
}

void SphericalGridVolume::write_csv(std::ostream& os) const {
  os << "# n_rho,n_phi1,n_phi2,drho\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g\n", int(rho.size()), n_phi1,
                n_phi2, drho);
  os << buf << "rho,ang,re,im\n";
  for (int i = 0; i < rho.size(); ++i)
    for (int ia = 0; ia < n_ang(); ++ia) {
      std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g\n", rho[i], ia,
                    values(i, ia).real(), values(i, ia).imag());
      os << buf;
    }
}

SphericalGridVolume SphericalGridVolume::read_csv(std::istream& is) {
  std::string line;
  std::getline(is, line);  // comment
  std::getline(is, line);
  int n_rho, n_phi1, n_phi2;
  double drho;
  if (std::sscanf(line.c_str(), "%d,%d,%d,%lg", &n_rho, &n_phi1, &n_phi2,
                  &drho) != 4)
    throw std::runtime_error("volume csv: bad size line");
  SphericalGridVolume v = make_grid(n_rho, n_phi1, n_phi2, drho * n_rho);
  std::getline(is, line);  // header
  for (int i = 0; i < n_rho; ++i)
    for (int ia = 0; ia < v.n_ang(); ++ia) {
      std::getline(is, line);
      double r, re, im;
      int a;
      if (std::sscanf(line.c_str(), "%lg,%d,%lg,%lg", &r, &a, &re, &im) != 4)
        throw std::runtime_error("volume csv: bad row");
      v.values(i, a) = {re, im};
    }
  return v;
}

void RadialBasis::write_csv(std::ostream& os) const {
  os << "rho";
  for (int s = 0; s < S(); ++s) os << ",z" << s + 1;
  os << "\n";
  char buf[64];
  for (int i = 0; i < rho.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", rho[i]);
    os << buf;
    for (int s = 0; s < S(); ++s) {
      std::snprintf(buf, sizeof buf, ",%.17g", z(i, s));
      os << buf;
    }
    os << "\n";
  }
}

RadialBasis RadialBasis::read_csv(std::istream& is) {
  std::string line;
  std::getline(is, line);
  int S = 0;
  for (char c : line) S += c == ',';
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (int(row.size()) != S + 1)
      throw std::runtime_error("basis csv: bad row");
    rows.push_back(std::move(row));
  }
  RadialBasis b;
  b.rho.resize(Eigen::Index(rows.size()));
  b.z.resize(Eigen::Index(rows.size()), S);
  for (size_t i = 0; i < rows.size(); ++i) {
    b.rho[Eigen::Index(i)] = rows[i][0];
    for (int s = 0; s < S; ++s) b.z(Eigen::Index(i), s) = rows[i][size_t(s) + 1];
  }
  if (rows.size() > 1) b.drho = b.rho[1] - b.rho[0];
  return b;
}

}  // namespace orbit::basisgen
