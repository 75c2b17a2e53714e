#include "orbitrec/models.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "orbitrec/kernels.hpp"
#include "orbitrec/transforms.hpp"

namespace orbit::models {

std::string kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::mra: return "mra";
    case ModelKind::mra_projected: return "mra-projected";
    case ModelKind::sphere: return "sphere";
    case ModelKind::cryo: return "cryo";
    case ModelKind::cryo_projected: return "cryo-projected";
    case ModelKind::procrustes: return "procrustes";
  }
  return "?";
}

ModelKind kind_from_name(const std::string& name) {
  if (name == "mra") return ModelKind::mra;
  if (name == "mra-projected" || name == "mra_projected")
    return ModelKind::mra_projected;
  if (name == "sphere") return ModelKind::sphere;
  if (name == "cryo") return ModelKind::cryo;
  if (name == "cryo-projected" || name == "cryo_projected")
    return ModelKind::cryo_projected;
  if (name == "procrustes") return ModelKind::procrustes;
  throw std::invalid_argument("unknown model kind: " + name);
}

bool ModelSpec::projected() const {
  return kind == ModelKind::mra_projected || kind == ModelKind::cryo_projected;
}

bool ModelSpec::so2_based() const {
  return kind == ModelKind::mra || kind == ModelKind::mra_projected;
}

int ModelSpec::max_S() const {
  int s = 0;
  for (int v : S) s = std::max(s, v);
  return s;
}

int ModelSpec::dim() const {
  switch (kind) {
    case ModelKind::mra:
    case ModelKind::mra_projected:
      return 2 * L + 1;
    case ModelKind::sphere:
      return (L + 1) * (L + 1);
    case ModelKind::cryo:
    case ModelKind::cryo_projected: {
      int d = 0;
      for (int l = 0; l <= L; ++l) d += (2 * l + 1) * S[l];
      return d;
    }
    case ModelKind::procrustes:
      return 3 * atoms;
  }
  return 0;
}

int ModelSpec::proj_dim() const {
  if (kind == ModelKind::mra_projected) return L + 1;
  if (kind == ModelKind::cryo_projected) return max_S() * (2 * L + 1);
  return dim();
}

int ModelSpec::mra_offset(int l, int comp) const {
  if (l == 0) return 0;
  return 1 + 2 * (l - 1) + (comp - 1);
}

int ModelSpec::sphere_offset(int l, int m) const { return l * l + (m + l); }

int ModelSpec::cryo_offset(int l, int s, int m) const {
  int base = 0;
  for (int lp = 0; lp < l; ++lp) base += (2 * lp + 1) * S[lp];
  return base + s * (2 * l + 1) + (m + l);
}

int ModelSpec::image_offset(int s, int m) const {
  return s * (2 * L + 1) + (m + L);
}

nlohmann::json ModelSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name(kind);
  j["L"] = L;
  j["S"] = S;
  j["m"] = atoms;
  return j;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  return make_model(kind_from_name(j.at("kind").get<std::string>()),
                    j.value("L", 0), j.value("S", std::vector<int>{}),
                    j.value("m", 0));
}

ModelSpec make_model(ModelKind kind, int L, const std::vector<int>& S,
                     int atoms) {
  ModelSpec m;
  m.kind = kind;
  m.L = L;
  m.S = S;
  m.atoms = atoms;
  switch (kind) {
    case ModelKind::mra:
    case ModelKind::mra_projected:
    case ModelKind::sphere:
      if (L < 1) throw std::invalid_argument("make_model: need L >= 1");
      break;
    case ModelKind::cryo:
    case ModelKind::cryo_projected:
      if (L < 0) throw std::invalid_argument("make_model: need L >= 0");
      if (int(S.size()) != L + 1)
        throw std::invalid_argument("make_model: need S_0..S_L");
      for (int s : S)
        if (s < 1) throw std::invalid_argument("make_model: need S_l >= 1");
      break;
    case ModelKind::procrustes:
      if (atoms < 3) throw std::invalid_argument("make_model: need m >= 3");
      break;
  }
  return m;
}

std::vector<int> DimLedger::tiers() const {
  std::vector<int> t{d1, d2};
  if (K >= 3) t.push_back(d3);
  return t;
}

int DimLedger::cum(int k) const {
  if (k <= 0) return 0;
  if (k == 1) return d1;
  if (k == 2) return d1 + d2;
  return d1 + d2 + d3;
}

namespace {

// Rank of the pairwise inner-product Jacobian of S vectors in R^{2l+1}.
int pair_gram_dim(int l, int S) {
  if (S < 2 * l + 1) return S * (S + 1) / 2;
  return (2 * l + 1) * (S - l);
}

}  // namespace

DimLedger predicted_dims(const ModelSpec& model) {
  DimLedger out;
  const int d = model.dim();
  switch (model.kind) {
    case ModelKind::mra:
    case ModelKind::mra_projected:
      out.d0 = 1;
      out.d1 = 1;
      out.d2 = model.L;
      out.d3 = model.L - 1;
      out.K = model.L == 1 ? 2 : 3;
      break;
    case ModelKind::sphere:
      if (model.L < 10)
        throw HypothesisError("predicted_dims: sphere needs L >= 10 (got L = " +
                              std::to_string(model.L) + ")");
      out.d0 = 3;
      out.d1 = 1;
      out.d2 = model.L;
      out.d3 = d - 3 - (model.L + 1);
      out.K = 3;
      break;
    case ModelKind::cryo:
    case ModelKind::cryo_projected: {
      const int smin = model.kind == ModelKind::cryo ? 2 : 4;
      for (int l = 0; l <= model.L; ++l)
        if (model.S[l] < smin)
          throw HypothesisError("predicted_dims: " + kind_name(model.kind) +
                                " needs S_l >= " + std::to_string(smin) +
                                " for all l (S_" + std::to_string(l) + " = " +
                                std::to_string(model.S[l]) + ")");
      if (model.L < 1)
        throw HypothesisError("predicted_dims: cryo kinds need L >= 1");
      int t2 = 0;
      for (int l = 0; l <= model.L; ++l) t2 += pair_gram_dim(l, model.S[l]);
      out.d0 = 3;
      out.d1 = model.S[0];
      out.d2 = t2 - model.S[0];
      out.d3 = d - 3 - t2;
      out.K = model.L == 1 ? 2 : 3;
      break;
    }
    case ModelKind::procrustes:
      out.d0 = 3;
      out.d1 = 0;
      out.d2 = d - 3;
      out.d3 = 0;
      out.K = 2;
      break;
  }
  return out;
}

MomentStack moment_tensor(const ModelSpec& model, const Eigen::VectorXd& theta,
                          int k, const group::QuadratureRule& rule,
                          std::ostream* warnings) {
  if (k < 1 || k > 3) throw std::invalid_argument("moment_tensor: k in 1..3");
  if (theta.size() != model.dim())
    throw std::invalid_argument("moment_tensor: theta length != d");
  const int bandlimit = model.kind == ModelKind::procrustes ? 1 : model.L;
  if (rule.degree < k * bandlimit && warnings)
    *warnings << "moment_tensor: rule degree " << rule.degree
              << " below k*bandlimit = " << k * bandlimit << "\n";
  const int e = model.proj_dim();
  if (k == 3 && e > 64)
    throw std::invalid_argument(
        "moment_tensor: k=3 tensor materialization capped at edge 64");

  MomentStack out;
  out.k = k;
  out.edge = e;
  for (int j = 1; j <= k; ++j) {
    size_t n = 1;
    for (int t = 0; t < j; ++t) n *= size_t(e);
    out.tensors.emplace_back(Eigen::VectorXd::Zero(Eigen::Index(n)));
  }
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double w = rule.weights[i];
    Eigen::VectorXd y = observe(model, rule.nodes[i], theta);
    kern::axpy(w, y.data(), out.tensors[0].data(), size_t(e));
    if (k >= 2) kern::rank1_update(w, y.data(), out.tensors[1].data(), size_t(e));
    if (k >= 3) {
      double* t3 = out.tensors[2].data();
      for (int a = 0; a < e; ++a)
        for (int b = 0; b < e; ++b)
          kern::axpy(w * y[a] * y[b], y.data(),
                     t3 + (size_t(a) * e + b) * e, size_t(e));
    }
  }
  return out;
}

}  // namespace orbit::models
