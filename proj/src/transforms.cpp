#include "orbitrec/transforms.hpp"

#include <cmath>
#include <stdexcept>

#include "orbitrec/harmonics.hpp"

namespace orbit::group {

using models::ModelKind;
using models::ModelSpec;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

std::complex<double> i_pow(int l) {
  switch (((l % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

double par(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

void check_mra_rule(const ModelSpec& model, const GroupElement& g) {
  if (model.so2_based() != (g.kind == GroupElement::Kind::SO2))
    throw std::invalid_argument("act: group element kind does not match model");
}

}  // namespace

Eigen::VectorXcd to_complex(const ModelSpec& model, const Eigen::VectorXd& theta) {
  if (theta.size() != model.dim())
    throw std::invalid_argument("to_complex: theta length != d");
  switch (model.kind) {
    case ModelKind::mra:
    case ModelKind::mra_projected: {
      Eigen::VectorXcd u(model.L + 1);
      u[0] = theta[0];
      for (int l = 1; l <= model.L; ++l)
        u[l] = {theta[model.mra_offset(l, 1)], theta[model.mra_offset(l, 2)]};
      return u;
    }
    case ModelKind::sphere: {
      Eigen::VectorXcd u(model.dim());
      for (int l = 0; l <= model.L; ++l) {
        u[model.sphere_offset(l, 0)] = theta[model.sphere_offset(l, 0)];
        for (int m = 1; m <= l; ++m) {
          double tp = theta[model.sphere_offset(l, m)];
          double tn = theta[model.sphere_offset(l, -m)];
          u[model.sphere_offset(l, m)] =
              par(m) * kInvSqrt2 * std::complex<double>(tp, -tn);
          u[model.sphere_offset(l, -m)] =
              kInvSqrt2 * std::complex<double>(tp, tn);
        }
      }
      return u;
    }
    case ModelKind::cryo:
    case ModelKind::cryo_projected: {
      Eigen::VectorXcd u(model.dim());
      for (int l = 0; l <= model.L; ++l)
        for (int s = 0; s < model.S[l]; ++s) {
          u[model.cryo_offset(l, s, 0)] =
              i_pow(l) * theta[model.cryo_offset(l, s, 0)];
          for (int m = 1; m <= l; ++m) {
            double tp = theta[model.cryo_offset(l, s, m)];
            double tn = theta[model.cryo_offset(l, s, -m)];
            u[model.cryo_offset(l, s, m)] =
                par(l + m) * kInvSqrt2 * std::complex<double>(tp, -tn);
            u[model.cryo_offset(l, s, -m)] =
                kInvSqrt2 * std::complex<double>(tp, tn);
          }
        }
      return u;
    }
    case ModelKind::procrustes:
      throw std::invalid_argument("to_complex: not defined for procrustes");
  }
  throw std::logic_error("to_complex: unreachable");
}

Eigen::VectorXd from_complex(const ModelSpec& model, const Eigen::VectorXcd& u) {
  switch (model.kind) {
    case ModelKind::mra:
    case ModelKind::mra_projected: {
      if (u.size() != model.L + 1)
        throw std::invalid_argument("from_complex: length mismatch");
      Eigen::VectorXd theta(model.dim());
      theta[0] = u[0].real();
      for (int l = 1; l <= model.L; ++l) {
        theta[model.mra_offset(l, 1)] = u[l].real();
        theta[model.mra_offset(l, 2)] = u[l].imag();
      }
      return theta;
    }
    case ModelKind::sphere: {
      if (u.size() != model.dim())
        throw std::invalid_argument("from_complex: length mismatch");
      Eigen::VectorXd theta(model.dim());
      for (int l = 0; l <= model.L; ++l) {
        theta[model.sphere_offset(l, 0)] = u[model.sphere_offset(l, 0)].real();
        for (int m = 1; m <= l; ++m) {
          auto up = u[model.sphere_offset(l, m)];
          auto un = u[model.sphere_offset(l, -m)];
          theta[model.sphere_offset(l, m)] =
              ((par(m) * up + un) * kInvSqrt2).real();
          theta[model.sphere_offset(l, -m)] =
              ((un - par(m) * up) * kInvSqrt2).imag();
        }
      }
      return theta;
    }
    case ModelKind::cryo:
    case ModelKind::cryo_projected: {
      if (u.size() != model.dim())
        throw std::invalid_argument("from_complex: length mismatch");
      Eigen::VectorXd theta(model.dim());
      for (int l = 0; l <= model.L; ++l)
        for (int s = 0; s < model.S[l]; ++s) {
          theta[model.cryo_offset(l, s, 0)] =
              (std::conj(i_pow(l)) * u[model.cryo_offset(l, s, 0)]).real();
          for (int m = 1; m <= l; ++m) {
            auto up = u[model.cryo_offset(l, s, m)];
            auto un = u[model.cryo_offset(l, s, -m)];
            theta[model.cryo_offset(l, s, m)] =
                ((par(l + m) * up + un) * kInvSqrt2).real();
            theta[model.cryo_offset(l, s, -m)] =
                ((un - par(l + m) * up) * kInvSqrt2).imag();
          }
        }
      return theta;
    }
    case ModelKind::procrustes:
      throw std::invalid_argument("from_complex: not defined for procrustes");
  }
  throw std::logic_error("from_complex: unreachable");
}

Eigen::VectorXd act(const ModelSpec& model, const GroupElement& g,
                    const Eigen::VectorXd& theta) {
  if (theta.size() != model.dim())
    throw std::invalid_argument("act: theta length != d");
  if (model.kind == ModelKind::procrustes) {
    if (g.kind != GroupElement::Kind::SO3)
      throw std::invalid_argument("act: procrustes needs an SO(3) element");
    Eigen::Matrix3d R = euler_to_matrix(g.euler);
    Eigen::Map<const Eigen::Matrix<double, 3, Eigen::Dynamic>> mat(
        theta.data(), 3, model.atoms);
    Eigen::VectorXd out(theta.size());
    Eigen::Map<Eigen::Matrix<double, 3, Eigen::Dynamic>>(out.data(), 3,
                                                         model.atoms) = R * mat;
    return out;
  }
  check_mra_rule(model, g);
  if (model.so2_based()) {
    Eigen::VectorXd out(theta.size());
    out[0] = theta[0];
    for (int l = 1; l <= model.L; ++l) {
      double phi = kTwoPi * l * g.angle;
      double c = std::cos(phi), s = std::sin(phi);
      double t1 = theta[model.mra_offset(l, 1)];
      double t2 = theta[model.mra_offset(l, 2)];
      out[model.mra_offset(l, 1)] = c * t1 + s * t2;
      out[model.mra_offset(l, 2)] = -s * t1 + c * t2;
    }
    return out;
  }
  // sphere / cryo kinds: rotate each complex frequency block.
  Eigen::VectorXcd u = to_complex(model, theta);
  Eigen::VectorXcd v(u.size());
  if (model.kind == ModelKind::sphere) {
    for (int l = 0; l <= model.L; ++l) {
      auto D = harmonics::wigner_d(l, g.euler);
      v.segment(model.sphere_offset(l, -l), 2 * l + 1) =
          D.entries * u.segment(model.sphere_offset(l, -l), 2 * l + 1);
    }
  } else {
    for (int l = 0; l <= model.L; ++l) {
      auto D = harmonics::wigner_d(l, g.euler);
      for (int s = 0; s < model.S[l]; ++s)
        v.segment(model.cryo_offset(l, s, -l), 2 * l + 1) =
            D.entries * u.segment(model.cryo_offset(l, s, -l), 2 * l + 1);
    }
  }
  return from_complex(model, v);
}

Eigen::MatrixXd action_matrix(const ModelSpec& model, const GroupElement& g) {
  const int d = model.dim();
  Eigen::MatrixXd A(d, d);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < d; ++j) {
    e[j] = 1.0;
    A.col(j) = act(model, g, e);
    e[j] = 0.0;
  }
  return A;
}

}  // namespace orbit::group

namespace orbit::models {

Eigen::VectorXd project(const ModelSpec& model, const Eigen::VectorXd& theta) {
  if (theta.size() != model.dim())
    throw std::invalid_argument("project: theta length != d");
  switch (model.kind) {
    case ModelKind::mra_projected: {
      Eigen::VectorXd out(model.proj_dim());
      out[0] = std::sqrt(2.0) * theta[0];
      for (int l = 1; l <= model.L; ++l)
        out[l] = std::sqrt(2.0) * theta[model.mra_offset(l, 1)];
      return out;
    }
    case ModelKind::cryo_projected: {
      Eigen::VectorXcd u = group::to_complex(model, theta);
      Eigen::VectorXcd tu = project_complex(model, u);
      // Invert the image-plane unitary V~ (sphere-pattern phases, no i^l).
      Eigen::VectorXd out(model.proj_dim());
      constexpr double inv_sqrt2 = 0.70710678118654752440084436210485;
      for (int s = 0; s < model.max_S(); ++s) {
        out[model.image_offset(s, 0)] = tu[model.image_offset(s, 0)].real();
        for (int m = 1; m <= model.L; ++m) {
          double sgn = m % 2 == 0 ? 1.0 : -1.0;
          auto up = tu[model.image_offset(s, m)];
          auto un = tu[model.image_offset(s, -m)];
          out[model.image_offset(s, m)] = ((sgn * up + un) * inv_sqrt2).real();
          out[model.image_offset(s, -m)] = ((un - sgn * up) * inv_sqrt2).imag();
        }
      }
      return out;
    }
    default:
      throw std::invalid_argument("project: model kind " +
                                  kind_name(model.kind) + " is unprojected");
  }
}

Eigen::VectorXcd project_complex(const ModelSpec& model,
                                 const Eigen::VectorXcd& u) {
  if (model.kind != ModelKind::cryo_projected)
    throw std::invalid_argument("project_complex: cryo-projected only");
  const int S = model.max_S();
  Eigen::VectorXcd tu = Eigen::VectorXcd::Zero(Eigen::Index(S) * (2 * model.L + 1));
  for (int l = 0; l <= model.L; ++l)
    for (int m = -l; m <= l; ++m) {
      double p = harmonics::fourier_slice_coeff(l, m);
      if (p == 0.0) continue;
      for (int s = 0; s < model.S[l]; ++s)
        tu[model.image_offset(s, m)] += p * u[model.cryo_offset(l, s, m)];
    }
  return tu;
}

Eigen::VectorXd observe(const ModelSpec& model, const group::GroupElement& g,
                        const Eigen::VectorXd& theta) {
  Eigen::VectorXd rotated = group::act(model, g, theta);
  return model.projected() ? project(model, rotated) : rotated;
}

}  // namespace orbit::models
