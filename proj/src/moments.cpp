#include "orbitrec/moments.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "orbitrec/harmonics.hpp"
#include "orbitrec/transforms.hpp"

namespace orbit::moments {

using models::ModelKind;
using models::ModelSpec;
using cplx = std::complex<double>;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

cplx i_pow(int l) {
  switch (((l % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

double par(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

// u_{l,s,m} as a complex-linear form in at most two theta coordinates.
struct ULin {
  int n = 0;
  int col[2] = {0, 0};
  cplx w[2] = {0, 0};
};

ULin u_lin(const ModelSpec& model, int l, int s, int m) {
  ULin out;
  const bool cryo = model.kind == ModelKind::cryo ||
                    model.kind == ModelKind::cryo_projected;
  auto off = [&](int mm) {
    return cryo ? model.cryo_offset(l, s, mm) : model.sphere_offset(l, mm);
  };
  const double phase = cryo ? par(l + std::abs(m)) : par(std::abs(m));
  if (m == 0) {
    out.n = 1;
    out.col[0] = off(0);
    out.w[0] = cryo ? i_pow(l) : cplx(1, 0);
    return out;
  }
  out.n = 2;
  out.col[0] = off(std::abs(m));
  out.col[1] = off(-std::abs(m));
  if (m > 0) {
    out.w[0] = phase * kInvSqrt2;
    out.w[1] = cplx(0, -phase * kInvSqrt2);
  } else {
    out.w[0] = kInvSqrt2;
    out.w[1] = cplx(0, kInvSqrt2);
  }
  return out;
}

std::vector<BispectrumEntry> harmonic_triples(const ModelSpec& model) {
  std::vector<BispectrumEntry> out;
  const int L = model.L;
  const bool cryo = model.kind == ModelKind::cryo ||
                    model.kind == ModelKind::cryo_projected;
  for (int l = 0; l <= L; ++l)
    for (int lp = 0; lp <= L; ++lp)
      for (int lpp = std::abs(l - lp); lpp <= std::min(L, l + lp); ++lpp) {
        if (!cryo) {
          out.push_back({l, -1, lp, -1, lpp, -1});
          continue;
        }
        for (int s = 0; s < model.S[l]; ++s)
          for (int sp = 0; sp < model.S[lp]; ++sp)
            for (int spp = 0; spp < model.S[lpp]; ++spp)
              out.push_back({l, s, lp, sp, lpp, spp});
      }
  return out;
}

// All (l, l', l'') with l = l' + l'' inside the bandlimit.
std::vector<BispectrumEntry> mra_triples(int L) {
  std::vector<BispectrumEntry> out;
  for (int lp = 0; lp <= L; ++lp)
    for (int lpp = 0; lpp <= L; ++lpp)
      if (lp + lpp <= L) out.push_back({lp + lpp, -1, lp, -1, lpp, -1});
  return out;
}

// Clebsch-Gordan table for one (l, lp, lpp), indexed by (m+l, mp+lp).
Eigen::MatrixXd cg_table(int l, int lp, int lpp) {
  Eigen::MatrixXd t(2 * l + 1, 2 * lp + 1);
  for (int m = -l; m <= l; ++m)
    for (int mp = -lp; mp <= lp; ++mp) {
      int mpp = m + mp;
      t(m + l, mp + lp) =
          std::abs(mpp) <= lpp
              ? harmonics::clebsch_gordan({l, lp, lpp, m, mp, mpp})
              : 0.0;
    }
  return t;
}

struct BispCore {
  std::vector<BispectrumEntry> triples;
  Eigen::VectorXcd B;
  Eigen::MatrixXcd dB;  // filled only if requested
};

BispCore eval_harmonic_bisp(const ModelSpec& model, const Eigen::VectorXd& theta,
                            bool want_jac) {
  BispCore out;
  out.triples = harmonic_triples(model);
  const int d = model.dim();
  const int nT = int(out.triples.size());
  out.B.setZero(nT);
  if (want_jac) out.dB.setZero(nT, d);

  int last_l = -1, last_lp = -1, last_lpp = -1;
  Eigen::MatrixXd cg;
  for (int t = 0; t < nT; ++t) {
    const auto& T = out.triples[t];
    if (T.l != last_l || T.lp != last_lp || T.lpp != last_lpp) {
      cg = cg_table(T.l, T.lp, T.lpp);
      last_l = T.l;
      last_lp = T.lp;
      last_lpp = T.lpp;
    }
    cplx acc = 0;
    for (int m = -T.l; m <= T.l; ++m)
      for (int mp = -T.lp; mp <= T.lp; ++mp) {
        int mpp = m + mp;
        if (std::abs(mpp) > T.lpp) continue;
        double c = cg(m + T.l, mp + T.lp);
        if (c == 0.0) continue;
        ULin la = u_lin(model, T.l, T.s, m);
        ULin lb = u_lin(model, T.lp, T.sp, mp);
        ULin lc = u_lin(model, T.lpp, T.spp, mpp);
        cplx ua = 0, ub = 0, uc = 0;
        for (int i = 0; i < la.n; ++i) ua += la.w[i] * theta[la.col[i]];
        for (int i = 0; i < lb.n; ++i) ub += lb.w[i] * theta[lb.col[i]];
        for (int i = 0; i < lc.n; ++i) uc += lc.w[i] * theta[lc.col[i]];
        acc += c * std::conj(ua * ub) * uc;
        if (want_jac) {
          for (int i = 0; i < la.n; ++i)
            out.dB(t, la.col[i]) += c * std::conj(la.w[i] * ub) * uc;
          for (int i = 0; i < lb.n; ++i)
            out.dB(t, lb.col[i]) += c * std::conj(ua * lb.w[i]) * uc;
          for (int i = 0; i < lc.n; ++i)
            out.dB(t, lc.col[i]) += c * std::conj(ua * ub) * lc.w[i];
        }
      }
    out.B[t] = acc;
  }
  return out;
}

// --- root features: s_k(theta) = || R(theta) - R(theta_star) ||^2 ----------

struct Rows {
  std::vector<double> R;
  std::vector<Eigen::VectorXd> J;
  bool want_jac = false;
  int d = 0;

  void add(double value, Eigen::VectorXd grad) {
    R.push_back(value);
    if (want_jac) J.push_back(std::move(grad));
  }
  void add_sparse(double value,
                  std::initializer_list<std::pair<int, double>> g) {
    R.push_back(value);
    if (want_jac) {
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
      for (auto& [c, v] : g) grad[c] += v;
      J.push_back(std::move(grad));
    }
  }
};

void mra_features(const ModelSpec& model, int k, const Eigen::VectorXd& theta,
                  Rows& rows, bool projected) {
  const int L = model.L;
  const double t0 = theta[0];
  if (k == 1) {
    double c = projected ? 1.0 : kInvSqrt2;
    rows.add_sparse(c * t0, {{0, c}});
    return;
  }
  if (k == 2) {
    double c0 = projected ? 1.0 : 0.5;
    rows.add_sparse(c0 * t0 * t0, {{0, 2.0 * c0 * t0}});
    double cl = projected ? 0.5 : std::sqrt(1.0 / 8.0);
    for (int l = 1; l <= L; ++l) {
      int i1 = model.mra_offset(l, 1), i2 = model.mra_offset(l, 2);
      rows.add_sparse(cl * (theta[i1] * theta[i1] + theta[i2] * theta[i2]),
                      {{i1, 2.0 * cl * theta[i1]}, {i2, 2.0 * cl * theta[i2]}});
    }
    return;
  }
  // k == 3
  double c0 = projected ? std::sqrt(2.0 / 3.0) : std::sqrt(1.0 / 48.0);
  rows.add_sparse(c0 * t0 * t0 * t0, {{0, 3.0 * c0 * t0 * t0}});
  if (projected) {
    double cm = std::sqrt(0.5);
    for (int l = 1; l <= L; ++l) {
      int i1 = model.mra_offset(l, 1), i2 = model.mra_offset(l, 2);
      double r2 = theta[i1] * theta[i1] + theta[i2] * theta[i2];
      rows.add_sparse(cm * t0 * r2, {{0, cm * r2},
                                     {i1, 2.0 * cm * t0 * theta[i1]},
                                     {i2, 2.0 * cm * t0 * theta[i2]}});
    }
  }
  auto uval = [&](int l) -> cplx {
    if (l == 0) return theta[0];
    return {theta[model.mra_offset(l, 1)], theta[model.mra_offset(l, 2)]};
  };
  const int lo = projected ? 1 : 0;
  for (int lp = lo; lp <= L; ++lp)
    for (int lpp = lo; lpp <= L; ++lpp) {
      int l = lp + lpp;
      if (l > L) continue;
      cplx ua = uval(l), ub = uval(lp), uc = uval(lpp);
      cplx x = ua * std::conj(ub * uc);
      Eigen::VectorXcd gx;
      if (rows.want_jac) {
        gx = Eigen::VectorXcd::Zero(rows.d);
        auto addu = [&](int freq, cplx dre, cplx dim) {
          // dre = dx/d(Re u_freq), dim = dx/d(Im u_freq)
          if (freq == 0) {
            gx[0] += dre;
          } else {
            gx[model.mra_offset(freq, 1)] += dre;
            gx[model.mra_offset(freq, 2)] += dim;
          }
        };
        cplx cbc = std::conj(ub * uc);
        addu(l, cbc, cplx(0, 1) * cbc);
        addu(lp, ua * std::conj(uc), cplx(0, -1) * ua * std::conj(uc));
        addu(lpp, ua * std::conj(ub), cplx(0, -1) * ua * std::conj(ub));
      }
      if (projected) {
        double cr = std::sqrt(1.0 / 8.0);
        rows.add(cr * x.real(),
                 rows.want_jac ? (cr * gx.real()).eval() : Eigen::VectorXd());
      } else {
        double cr = 0.25;  // sqrt(1/16)
        rows.add(cr * x.real(),
                 rows.want_jac ? (cr * gx.real()).eval() : Eigen::VectorXd());
        rows.add(cr * x.imag(),
                 rows.want_jac ? (cr * gx.imag()).eval() : Eigen::VectorXd());
      }
    }
}

void sphere_features(const ModelSpec& model, int k, const Eigen::VectorXd& theta,
                     Rows& rows) {
  const int L = model.L;
  if (k == 1) {
    int i0 = model.sphere_offset(0, 0);
    rows.add_sparse(kInvSqrt2 * theta[i0], {{i0, kInvSqrt2}});
    return;
  }
  if (k == 2) {
    for (int l = 0; l <= L; ++l) {
      double c = std::sqrt(1.0 / (4.0 * (2 * l + 1)));
      int base = model.sphere_offset(l, -l);
      double nrm2 = theta.segment(base, 2 * l + 1).squaredNorm();
      if (rows.want_jac) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(rows.d);
        g.segment(base, 2 * l + 1) = 2.0 * c * theta.segment(base, 2 * l + 1);
        rows.add(c * nrm2, std::move(g));
      } else {
        rows.add(c * nrm2, {});
      }
    }
    return;
  }
  BispCore bc = eval_harmonic_bisp(model, theta, rows.want_jac);
  for (Eigen::Index t = 0; t < bc.B.size(); ++t) {
    double c = std::sqrt(1.0 / (12.0 * (2 * bc.triples[size_t(t)].lpp + 1)));
    rows.add(c * bc.B[t].real(),
             rows.want_jac ? (c * bc.dB.row(t).real().transpose()).eval()
                           : Eigen::VectorXd());
    rows.add(c * bc.B[t].imag(),
             rows.want_jac ? (c * bc.dB.row(t).imag().transpose()).eval()
                           : Eigen::VectorXd());
  }
}

void cryo_features(const ModelSpec& model, int k, const Eigen::VectorXd& theta,
                   Rows& rows) {
  const int L = model.L;
  if (k == 1) {
    for (int s = 0; s < model.S[0]; ++s) {
      int i = model.cryo_offset(0, s, 0);
      rows.add_sparse(kInvSqrt2 * theta[i], {{i, kInvSqrt2}});
    }
    return;
  }
  if (k == 2) {
    for (int l = 0; l <= L; ++l) {
      double c = std::sqrt(1.0 / (4.0 * (2 * l + 1)));
      for (int s = 0; s < model.S[l]; ++s)
        for (int sp = 0; sp < model.S[l]; ++sp) {
          int bs = model.cryo_offset(l, s, -l);
          int bp = model.cryo_offset(l, sp, -l);
          double v =
              theta.segment(bs, 2 * l + 1).dot(theta.segment(bp, 2 * l + 1));
          if (rows.want_jac) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(rows.d);
            g.segment(bs, 2 * l + 1) += c * theta.segment(bp, 2 * l + 1);
            g.segment(bp, 2 * l + 1) += c * theta.segment(bs, 2 * l + 1);
            rows.add(c * v, std::move(g));
          } else {
            rows.add(c * v, {});
          }
        }
    }
    return;
  }
  BispCore bc = eval_harmonic_bisp(model, theta, rows.want_jac);
  for (Eigen::Index t = 0; t < bc.B.size(); ++t) {
    double c = std::sqrt(1.0 / (12.0 * (2 * bc.triples[size_t(t)].lpp + 1)));
    rows.add(c * bc.B[t].real(),
             rows.want_jac ? (c * bc.dB.row(t).real().transpose()).eval()
                           : Eigen::VectorXd());
  }
}

void cryo_projected_features(const ModelSpec& model, int k,
                             const Eigen::VectorXd& theta, Rows& rows) {
  const int L = model.L;
  const int S = model.max_S();
  if (k == 1) {
    double c = harmonics::fourier_slice_coeff(0, 0) * kInvSqrt2;
    for (int s = 0; s < model.S[0]; ++s) {
      int i = model.cryo_offset(0, s, 0);
      rows.add_sparse(c * theta[i], {{i, c}});
    }
    return;
  }
  if (k == 2) {
    // Pair features F_{l,s,s'} coupled through the squared slice weights:
    // rows over (q,t,t') give the exact square-root factor of the coupling.
    for (int q = -L; q <= L; ++q)
      for (int t = 0; t < S; ++t)
        for (int tp = 0; tp < S; ++tp) {
          double val = 0.0;
          Eigen::VectorXd grad;
          if (rows.want_jac) grad = Eigen::VectorXd::Zero(rows.d);
          bool any = false;
          for (int l = std::abs(q); l <= L; ++l) {
            if (t >= model.S[l] || tp >= model.S[l]) continue;
            double p = harmonics::fourier_slice_coeff(l, q);
            if (p == 0.0) continue;
            double coeff =
                std::sqrt(0.5) * par(l) / (2.0 * l + 1.0) * p * p * kInvSqrt2;
            int bs = model.cryo_offset(l, t, -l);
            int bp = model.cryo_offset(l, tp, -l);
            val += coeff *
                   theta.segment(bs, 2 * l + 1).dot(theta.segment(bp, 2 * l + 1));
            if (rows.want_jac) {
              grad.segment(bs, 2 * l + 1) +=
                  coeff * theta.segment(bp, 2 * l + 1);
              grad.segment(bp, 2 * l + 1) +=
                  coeff * theta.segment(bs, 2 * l + 1);
            }
            any = true;
          }
          if (any) rows.add(val, std::move(grad));
        }
    return;
  }
  // k == 3: rows sqrt(1/12) * (N B) over the zero-sum slice-order triples.
  BispCore bc = eval_harmonic_bisp(model, theta, rows.want_jac);
  const int nT = int(bc.triples.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(L + 1, 2 * L + 1);
  for (int l = 0; l <= L; ++l)
    for (int q = -l; q <= l; ++q)
      p(l, q + L) = harmonics::fourier_slice_coeff(l, q);
  const double c = std::sqrt(1.0 / 12.0);
  for (int q = -L; q <= L; ++q)
    for (int qp = -L; qp <= L; ++qp) {
      int qpp = -(q + qp);
      if (std::abs(qpp) > L) continue;
      for (int r = 0; r < S; ++r)
        for (int rp = 0; rp < S; ++rp)
          for (int rpp = 0; rpp < S; ++rpp) {
            double val = 0.0;
            Eigen::VectorXd grad;
            if (rows.want_jac) grad = Eigen::VectorXd::Zero(rows.d);
            bool any = false;
            for (int t = 0; t < nT; ++t) {
              const auto& T = bc.triples[size_t(t)];
              if (T.s != r || T.sp != rp || T.spp != rpp) continue;
              if (std::abs(q) > T.l || std::abs(qp) > T.lp ||
                  std::abs(qpp) > T.lpp)
                continue;
              double pw = p(T.l, q + L) * p(T.lp, qp + L) * p(T.lpp, qpp + L);
              if (pw == 0.0) continue;
              double cg =
                  harmonics::clebsch_gordan({T.l, T.lp, T.lpp, q, qp, -qpp});
              if (cg == 0.0) continue;
              double nw = par(T.lpp + qpp) / (2.0 * T.lpp + 1.0) * cg * pw;
              val += nw * bc.B[t].real();
              if (rows.want_jac) grad += nw * bc.dB.row(t).real().transpose();
              any = true;
            }
            if (any)
              rows.add(c * val,
                       rows.want_jac ? (c * grad).eval() : Eigen::VectorXd());
          }
    }
}

void procrustes_features(const ModelSpec& model, int k,
                         const Eigen::VectorXd& theta, Rows& rows) {
  const int m = model.atoms;
  Eigen::Map<const Eigen::Matrix<double, 3, Eigen::Dynamic>> X(theta.data(), 3,
                                                               m);
  if (k == 1) return;  // first moment vanishes identically
  if (k == 2) {
    double c = std::sqrt(1.0 / 12.0);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        double v = X.col(a).dot(X.col(b));
        if (rows.want_jac) {
          Eigen::VectorXd g = Eigen::VectorXd::Zero(rows.d);
          Eigen::Map<Eigen::Matrix<double, 3, Eigen::Dynamic>> G(g.data(), 3, m);
          G.col(a) += c * X.col(b);
          G.col(b) += c * X.col(a);
          rows.add(c * v, std::move(g));
        } else {
          rows.add(c * v, {});
        }
      }
    return;
  }
  // k == 3: 3x3 column-minor determinants (Cauchy-Binet factor of det(X Y^T)).
  double c = std::sqrt(1.0 / 12.0);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int e = b + 1; e < m; ++e) {
        Eigen::Vector3d ca = X.col(a), cb = X.col(b), ce = X.col(e);
        double det = ca.dot(cb.cross(ce));
        if (rows.want_jac) {
          Eigen::VectorXd g = Eigen::VectorXd::Zero(rows.d);
          Eigen::Map<Eigen::Matrix<double, 3, Eigen::Dynamic>> G(g.data(), 3, m);
          G.col(a) = c * cb.cross(ce);
          G.col(b) = c * ce.cross(ca);
          G.col(e) = c * ca.cross(cb);
          rows.add(c * det, std::move(g));
        } else {
          rows.add(c * det, {});
        }
      }
}

}  // namespace

void features(const ModelSpec& model, int k, const Eigen::VectorXd& theta,
              Eigen::VectorXd& R, Eigen::MatrixXd* J) {
  if (k < 1 || k > 3) throw std::invalid_argument("features: k in 1..3");
  if (theta.size() != model.dim())
    throw std::invalid_argument("features: theta length != d");
  Rows rows;
  rows.want_jac = J != nullptr;
  rows.d = model.dim();
  switch (model.kind) {
    case ModelKind::mra: mra_features(model, k, theta, rows, false); break;
    case ModelKind::mra_projected:
      mra_features(model, k, theta, rows, true);
      break;
    case ModelKind::sphere: sphere_features(model, k, theta, rows); break;
    case ModelKind::cryo: cryo_features(model, k, theta, rows); break;
    case ModelKind::cryo_projected:
      cryo_projected_features(model, k, theta, rows);
      break;
    case ModelKind::procrustes:
      procrustes_features(model, k, theta, rows);
      break;
  }
  const int n = int(rows.R.size());
  R.resize(n);
  for (int i = 0; i < n; ++i) R[i] = rows.R[size_t(i)];
  if (J) {
    J->resize(n, model.dim());
    for (int i = 0; i < n; ++i) J->row(i) = rows.J[size_t(i)].transpose();
  }
}

BispectrumVector bispectrum(const ModelSpec& model,
                            const Eigen::VectorXd& theta) {
  if (theta.size() != model.dim())
    throw std::invalid_argument("bispectrum: theta length != d");
  BispectrumVector out;
  if (model.kind == ModelKind::procrustes)
    throw std::invalid_argument("bispectrum: not defined for procrustes");
  if (model.so2_based()) {
    out.index = mra_triples(model.L);
    out.values.resize(Eigen::Index(out.index.size()));
    auto uval = [&](int l) -> cplx {
      if (l == 0) return theta[0];
      return {theta[model.mra_offset(l, 1)], theta[model.mra_offset(l, 2)]};
    };
    for (size_t t = 0; t < out.index.size(); ++t) {
      const auto& T = out.index[t];
      out.values[Eigen::Index(t)] =
          uval(T.l) * std::conj(uval(T.lp) * uval(T.lpp));
    }
    return out;
  }
  Eigen::VectorXcd B;
  eval_bispectrum(model, theta, B, nullptr);
  out.index = harmonic_triples(model);
  out.values = B;
  return out;
}

void eval_bispectrum(const ModelSpec& model, const Eigen::VectorXd& theta,
                     Eigen::VectorXcd& B, Eigen::MatrixXcd* dB) {
  BispCore bc = eval_harmonic_bisp(model, theta, dB != nullptr);
  B = std::move(bc.B);
  if (dB) *dB = std::move(bc.dB);
}

void BispectrumVector::write_csv(std::ostream& os) const {
  os << "l,s,lp,sp,lpp,spp,re,im\n";
  char buf[160];
  for (size_t i = 0; i < index.size(); ++i) {
    const auto& t = index[i];
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%d,%d,%.17g,%.17g\n", t.l, t.s,
                  t.lp, t.sp, t.lpp, t.spp, values[Eigen::Index(i)].real(),
                  values[Eigen::Index(i)].imag());
    os << buf;
  }
}

SeriesTerm s_closed(const ModelSpec& model, const Eigen::VectorXd& theta,
                    const Eigen::VectorXd& theta_star, int k) {
  Eigen::VectorXd R, Rs;
  Eigen::MatrixXd J;
  features(model, k, theta, R, &J);
  features(model, k, theta_star, Rs, nullptr);
  SeriesTerm out;
  out.k = k;
  if (R.size() == 0) {
    out.value = 0.0;
    out.gradient = Eigen::VectorXd::Zero(model.dim());
    return out;
  }
  Eigen::VectorXd delta = R - Rs;
  out.value = delta.squaredNorm();
  out.gradient = 2.0 * J.transpose() * delta;
  return out;
}

SeriesTerm s_oracle(const ModelSpec& model, const Eigen::VectorXd& theta,
                    const Eigen::VectorXd& theta_star, int k,
                    const group::QuadratureRule& rule) {
  if (k < 1 || k > 3) throw std::invalid_argument("s_oracle: k in 1..3");
  const int bandlimit = model.kind == ModelKind::procrustes ? 1 : model.L;
  if (rule.degree < k * bandlimit)
    throw std::invalid_argument(
        "s_oracle: rule degree " + std::to_string(rule.degree) +
        " < k*bandlimit = " + std::to_string(k * bandlimit));
  const double norm = 0.5 / (k == 1 ? 1.0 : k == 2 ? 2.0 : 6.0);
  SeriesTerm out;
  out.k = k;
  const size_t n = rule.nodes.size();
  if (!model.projected()) {
    double acc = 0.0;
    for (size_t j = 0; j < n; ++j) {
      Eigen::VectorXd gt = group::act(model, rule.nodes[j], theta);
      Eigen::VectorXd gs = group::act(model, rule.nodes[j], theta_star);
      double a = theta.dot(gt), b = theta.dot(gs), c = theta_star.dot(gs);
      acc += rule.weights[j] *
             (std::pow(a, k) - 2.0 * std::pow(b, k) + std::pow(c, k));
    }
    out.value = norm * acc;
    return out;
  }
  std::vector<Eigen::VectorXd> Pt(n), Ps(n);
  for (size_t j = 0; j < n; ++j) {
    Pt[j] = models::observe(model, rule.nodes[j], theta);
    Ps[j] = models::observe(model, rule.nodes[j], theta_star);
  }
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double wi = rule.weights[i];
    for (size_t j = 0; j < n; ++j) {
      double w = wi * rule.weights[j];
      double a = Pt[i].dot(Pt[j]), b = Pt[i].dot(Ps[j]), c = Ps[i].dot(Ps[j]);
      acc += w * (std::pow(a, k) - 2.0 * std::pow(b, k) + std::pow(c, k));
    }
  }
  out.value = norm * acc;
  return out;
}

Eigen::MatrixXd hessian_factor(const ModelSpec& model,
                               const Eigen::VectorXd& theta_star, int k) {
  Eigen::VectorXd R;
  Eigen::MatrixXd J;
  features(model, k, theta_star, R, &J);
  return std::sqrt(2.0) * J;
}

Eigen::MatrixXd s_hessian_at_star(const ModelSpec& model,
                                  const Eigen::VectorXd& theta_star, int k) {
  Eigen::MatrixXd F = hessian_factor(model, theta_star, k);
  if (F.rows() == 0) return Eigen::MatrixXd::Zero(model.dim(), model.dim());
  return F.transpose() * F;
}

}  // namespace orbit::moments
