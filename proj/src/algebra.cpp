#include "orbitrec/algebra.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "orbitrec/moments.hpp"

namespace orbit::algebra {

using models::ModelKind;
using models::ModelSpec;

EtaChart eta_chart(const ModelSpec& model) {
  const int d = model.dim();
  EtaChart chart;
  chart.M = Eigen::MatrixXd::Zero(d, d);
  auto par = [](int k) { return k % 2 == 0 ? 1.0 : -1.0; };
  int row = 0;
  switch (model.kind) {
    case ModelKind::sphere:
      for (int l = 0; l <= model.L; ++l) {
        chart.M(row++, model.sphere_offset(l, 0)) = 1.0;
        for (int m = 1; m <= l; ++m) {
          // sqrt(2) Re u_m = (-1)^m theta_m ; sqrt(2) Im u_m = -(-1)^m theta_{-m}
          chart.M(row++, model.sphere_offset(l, m)) = par(m);
          chart.M(row++, model.sphere_offset(l, -m)) = -par(m);
        }
      }
      break;
    case ModelKind::cryo:
    case ModelKind::cryo_projected:
      for (int l = 0; l <= model.L; ++l)
        for (int s = 0; s < model.S[l]; ++s) {
          // m = 0 entry: |u_0| equals theta_0 up to the i^l phase sign.
          double sg = (l % 4 == 2 || l % 4 == 3) ? -1.0 : 1.0;
          chart.M(row++, model.cryo_offset(l, s, 0)) = sg;
          for (int m = 1; m <= l; ++m) {
            chart.M(row++, model.cryo_offset(l, s, m)) = par(l + m);
            chart.M(row++, model.cryo_offset(l, s, -m)) = -par(l + m);
          }
        }
      break;
    default:
      chart.M.setIdentity();
      return chart;
  }
  return chart;
}

RankResult numerical_rank(const Eigen::MatrixXd& mat, const RankPolicy& policy) {
  RankResult out;
  if (mat.rows() == 0 || mat.cols() == 0) return out;
  if (!mat.allFinite())
    throw std::invalid_argument("numerical_rank: non-finite entries");
  // Row balancing: unit-normalize nonzero rows (rank-preserving).
  Eigen::MatrixXd B = mat;
  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    double n = B.row(i).norm();
    if (n > 0) B.row(i) /= n;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() ? out.singular_values[0] : 0.0;
  if (smax == 0.0) return out;
  const double cut = policy.rel_tol * smax;
  int r = 0;
  while (r < out.singular_values.size() && out.singular_values[r] > cut) ++r;
  out.rank = r;
  if (r == 0)
    out.gap = 0.0;
  else if (r >= out.singular_values.size() || out.singular_values[r] == 0.0)
    out.gap = std::numeric_limits<double>::infinity();
  else
    out.gap = out.singular_values[r - 1] / out.singular_values[r];
  return out;
}

namespace {

RankReport ladder_once(const ModelSpec& model, const Eigen::VectorXd& theta_star,
                       const RankPolicy& policy) {
  RankReport rep;
  rep.model = model;
  rep.predicted = models::predicted_dims(model);
  rep.tol = policy.rel_tol;
  const int K = rep.predicted.K;
  Eigen::MatrixXd stacked(0, model.dim());
  for (int k = 1; k <= 3; ++k) {
    Eigen::MatrixXd F = moments::hessian_factor(model, theta_star, k);
    Eigen::MatrixXd next(stacked.rows() + F.rows(), model.dim());
    next << stacked, F;
    stacked = std::move(next);
    if (k > K && rep.ranks.size() >= size_t(K)) {
      // Orders beyond K must not raise the rank; still record them.
    }
    RankResult rr = numerical_rank(stacked, policy);
    rep.ranks.push_back(rr.rank);
    rep.gaps.push_back(rr.gap);
    rep.spectra.push_back(rr.singular_values);
    rep.expected.push_back(rep.predicted.cum(k));
  }
  rep.match = true;
  for (size_t i = 0; i < rep.ranks.size(); ++i)
    if (rep.ranks[i] != rep.expected[i]) rep.match = false;
  return rep;
}

bool gaps_clear(const RankReport& rep, const RankPolicy& policy) {
  for (size_t i = 0; i < rep.gaps.size(); ++i) {
    // A full-rank factor has no tail; treat as clear.
    if (std::isinf(rep.gaps[i])) continue;
    if (rep.ranks[i] > 0 && rep.gaps[i] < policy.min_gap) return false;
  }
  return true;
}

}  // namespace

RankReport trdeg_ladder_at(const ModelSpec& model,
                           const Eigen::VectorXd& theta_star,
                           const RankPolicy& policy) {
  RankReport rep = ladder_once(model, theta_star, policy);
  if (!gaps_clear(rep, policy))
    throw NoRankGapError("trdeg_ladder: no clear spectral gap at the cut");
  return rep;
}

RankReport trdeg_ladder(const ModelSpec& model, SeedStream seed,
                        const RankPolicy& policy) {
  RankReport rep;
  for (int attempt = 0; attempt <= policy.max_redraws; ++attempt) {
    SeedStream draw = seed.split(uint64_t(attempt));
    Eigen::VectorXd theta(model.dim());
    for (int i = 0; i < theta.size(); ++i) theta[i] = draw.normal();
    rep = ladder_once(model, theta, policy);
    rep.redraws = attempt;
    if (rep.match && gaps_clear(rep, policy)) return rep;
  }
  if (!gaps_clear(rep, policy))
    throw NoRankGapError(
        "trdeg_ladder: no clear spectral gap after max redraws");
  return rep;  // ranks recorded; match flag tells the caller
}

nlohmann::json RankReport::to_json() const {
  nlohmann::json j;
  j["model"] = model.to_json();
  j["predicted"] = {{"d0", predicted.d0}, {"d1", predicted.d1},
                    {"d2", predicted.d2}, {"d3", predicted.d3},
                    {"K", predicted.K}};
  j["ranks"] = ranks;
  j["expected"] = expected;
  j["gaps"] = gaps;
  j["tol"] = tol;
  j["redraws"] = redraws;
  j["match"] = match;
  auto& sp = j["singular_values"] = nlohmann::json::array();
  for (const auto& s : spectra) {
    std::vector<double> v(s.data(), s.data() + s.size());
    sp.push_back(v);
  }
  return j;
}

Eigen::MatrixXd bispectrum_jacobian(const ModelSpec& model,
                                    const Eigen::VectorXd& eta) {
  if (model.kind != ModelKind::sphere && model.kind != ModelKind::cryo)
    throw std::invalid_argument("bispectrum_jacobian: sphere or cryo only");
  EtaChart chart = eta_chart(model);
  Eigen::VectorXd theta = chart.to_theta(eta);
  Eigen::VectorXcd B;
  Eigen::MatrixXcd dB;
  moments::eval_bispectrum(model, theta, B, &dB);
  Eigen::MatrixXcd dB_eta = dB * chart.M.transpose();
  if (model.kind == ModelKind::cryo) return dB_eta.real();
  Eigen::MatrixXd out(2 * dB_eta.rows(), dB_eta.cols());
  out << dB_eta.real(), dB_eta.imag();
  return out;
}

int pairwise_gram_rank(int l, int S, SeedStream seed) {
  if (l < 0 || S < 2)
    throw std::invalid_argument("pairwise_gram_rank: need l >= 0, S >= 2");
  const int n = 2 * l + 1;
  Eigen::MatrixXd theta(n, S);
  for (int j = 0; j < S; ++j)
    for (int i = 0; i < n; ++i) theta(i, j) = seed.normal();
  Eigen::MatrixXd J(S * (S + 1) / 2, n * S);
  J.setZero();
  int row = 0;
  for (int s = 0; s < S; ++s)
    for (int sp = s; sp < S; ++sp, ++row) {
      J.row(row).segment(s * n, n) += theta.col(sp).transpose();
      J.row(row).segment(sp * n, n) += theta.col(s).transpose();
    }
  return numerical_rank(J, RankPolicy{}).rank;
}

}  // namespace orbit::algebra
