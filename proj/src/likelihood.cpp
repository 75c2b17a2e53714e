#include "orbitrec/likelihood.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "orbitrec/kernels.hpp"
#include "orbitrec/transforms.hpp"

namespace orbit::likelihood {

using models::ModelSpec;

namespace {

// Mixture geometry shared by value/gradient/Hessian passes: per-node centers
// c_j = Pi g_j theta, transposed observation maps A_j^T, and Gram blocks.
struct MixturePre {
  int J = 0, d = 0, dt = 0;
  std::vector<double> logw;      // log weights (skipping w <= 0 nodes)
  std::vector<int> node_of;      // compacted -> rule node index
  RowMat centers;                // J x dt
  std::vector<double> At;        // J * d * dt, row-major A_j^T blocks
  std::vector<double> gram;      // J * d * d, A_j^T A_j blocks (on demand)

  const double* at(int j) const { return At.data() + size_t(j) * d * dt; }
  const double* gr(int j) const { return gram.data() + size_t(j) * d * d; }
};

MixturePre precompute(const ModelSpec& model, const Eigen::VectorXd& theta,
                      const group::QuadratureRule& rule, bool want_gram) {
  MixturePre pre;
  pre.d = model.dim();
  pre.dt = model.proj_dim();
  std::vector<int> keep;
  for (size_t j = 0; j < rule.nodes.size(); ++j)
    if (rule.weights[j] > 0.0) keep.push_back(int(j));
  pre.J = int(keep.size());
  pre.node_of = keep;
  pre.logw.resize(keep.size());
  pre.centers.resize(pre.J, pre.dt);
  pre.At.assign(size_t(pre.J) * pre.d * pre.dt, 0.0);
  for (int jj = 0; jj < pre.J; ++jj) {
    int j = keep[size_t(jj)];
    pre.logw[size_t(jj)] = std::log(rule.weights[size_t(j)]);
    pre.centers.row(jj) =
        models::observe(model, rule.nodes[size_t(j)], theta).transpose();
    // Columns of A_j by acting on basis vectors; stored transposed.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(pre.d);
    double* At_j = pre.At.data() + size_t(jj) * pre.d * pre.dt;
    for (int c = 0; c < pre.d; ++c) {
      e[c] = 1.0;
      Eigen::VectorXd col = models::observe(model, rule.nodes[size_t(j)], e);
      e[c] = 0.0;
      for (int r = 0; r < pre.dt; ++r) At_j[size_t(c) * pre.dt + r] = col[r];
    }
  }
  if (want_gram) {
    pre.gram.assign(size_t(pre.J) * pre.d * pre.d, 0.0);
    for (int j = 0; j < pre.J; ++j) {
      const double* At_j = pre.at(j);
      double* g = pre.gram.data() + size_t(j) * pre.d * pre.d;
      for (int a = 0; a < pre.d; ++a)
        for (int b = 0; b < pre.d; ++b)
          g[size_t(a) * pre.d + b] =
              kern::dot(At_j + size_t(a) * pre.dt, At_j + size_t(b) * pre.dt,
                        size_t(pre.dt));
    }
  }
  return pre;
}

// Posterior weights p_j for one sample; returns the sample's -log density
// (without the Gaussian normalizer). Weights below exp(-745) flush to zero.
double posterior(const MixturePre& pre, const double* y, double inv2s2,
                 std::vector<double>& p) {
  const int J = pre.J;
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < J; ++j) {
    double q = kern::sq_dist(y, pre.centers.data() + size_t(j) * pre.dt,
                             size_t(pre.dt));
    p[size_t(j)] = pre.logw[size_t(j)] - q * inv2s2;
    if (p[size_t(j)] > best) best = p[size_t(j)];
  }
  double z = 0.0;
  for (int j = 0; j < J; ++j) {
    double e = p[size_t(j)] - best;
    double v = e < -745.0 ? 0.0 : std::exp(e);
    p[size_t(j)] = v;
    z += v;
  }
  for (int j = 0; j < J; ++j) p[size_t(j)] /= z;
  return -(best + std::log(z));
}

void run_chunks(int n, int threads, const std::function<void(int, int, int)>& fn) {
  threads = std::max(1, threads);
  if (threads == 1) {
    fn(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    int lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi, t);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

SampleBatch generate(const ModelSpec& model, const Eigen::VectorXd& theta_star,
                     double sigma, int n, const group::QuadratureRule& rule,
                     uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate: n >= 1");
  if (!(sigma >= 0)) throw std::invalid_argument("generate: sigma >= 0");
  SampleBatch out;
  out.model = model;
  out.sigma = sigma;
  out.seed = seed;
  const int dt = model.proj_dim();
  out.y.resize(n, dt);
  out.hidden_nodes.resize(size_t(n));
  SeedStream root(seed);
  SeedStream rot = root.split(0);
  SeedStream noise = root.split(1);
  for (int i = 0; i < n; ++i) {
    int j = group::sample_node(rule, rot);
    out.hidden_nodes[size_t(i)] = j;
    Eigen::VectorXd c = models::observe(model, rule.nodes[size_t(j)], theta_star);
    for (int r = 0; r < dt; ++r) out.y(i, r) = c[r] + sigma * noise.normal();
  }
  return out;
}

double neg_log_lik(const ModelSpec& model, const Eigen::VectorXd& theta,
                   const SampleBatch& batch, const group::QuadratureRule& rule,
                   int threads) {
  if (batch.y.cols() != model.proj_dim())
    throw std::invalid_argument("neg_log_lik: batch dimension mismatch");
  MixturePre pre = precompute(model, theta, rule, false);
  const double s2 = batch.sigma * batch.sigma;
  const double inv2s2 = 0.5 / s2;
  const int n = batch.n();
  std::vector<double> partial(size_t(std::max(1, threads)), 0.0);
  run_chunks(n, threads, [&](int lo, int hi, int tid) {
    std::vector<double> p(size_t(pre.J));
    double acc = 0.0;
    for (int i = lo; i < hi; ++i)
      acc += posterior(pre, batch.y.data() + size_t(i) * pre.dt, inv2s2, p);
    partial[size_t(tid)] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  if (!std::isfinite(total))
    throw std::runtime_error("neg_log_lik: non-finite value");
  return total / n + 0.5 * pre.dt * std::log(2.0 * kPi * s2);
}

Eigen::VectorXd nll_gradient(const ModelSpec& model, const Eigen::VectorXd& theta,
                             const SampleBatch& batch,
                             const group::QuadratureRule& rule, int threads) {
  MixturePre pre = precompute(model, theta, rule, false);
  const double s2 = batch.sigma * batch.sigma;
  const double inv2s2 = 0.5 / s2;
  const int n = batch.n(), d = pre.d, dt = pre.dt;
  const int T = std::max(1, threads);
  std::vector<Eigen::VectorXd> acc(size_t(T), Eigen::VectorXd::Zero(d));
  run_chunks(n, threads, [&](int lo, int hi, int tid) {
    std::vector<double> p(size_t(pre.J));
    Eigen::VectorXd r(dt), b(d);
    Eigen::VectorXd& g = acc[size_t(tid)];
    for (int i = lo; i < hi; ++i) {
      const double* y = batch.y.data() + size_t(i) * dt;
      posterior(pre, y, inv2s2, p);
      for (int j = 0; j < pre.J; ++j) {
        if (p[size_t(j)] == 0.0) continue;
        const double* c = pre.centers.data() + size_t(j) * dt;
        for (int t = 0; t < dt; ++t) r[t] = y[t] - c[t];
        const double* At = pre.at(j);
        for (int a = 0; a < d; ++a)
          b[a] = kern::dot(At + size_t(a) * dt, r.data(), size_t(dt));
        kern::axpy(p[size_t(j)], b.data(), g.data(), size_t(d));
      }
    }
  });
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  for (const auto& a : acc) g += a;
  return -g / (double(n) * s2);
}

Eigen::MatrixXd nll_hessian(const ModelSpec& model, const Eigen::VectorXd& theta,
                            const SampleBatch& batch,
                            const group::QuadratureRule& rule, int threads) {
  MixturePre pre = precompute(model, theta, rule, true);
  const double s2 = batch.sigma * batch.sigma;
  const double inv2s2 = 0.5 / s2;
  const int n = batch.n(), d = pre.d, dt = pre.dt;
  const int T = std::max(1, threads);
  // Per-thread: covariance accumulator and per-node posterior mass.
  std::vector<Eigen::MatrixXd> cov(size_t(T), Eigen::MatrixXd::Zero(d, d));
  std::vector<Eigen::VectorXd> mass(size_t(T), Eigen::VectorXd::Zero(pre.J));
  run_chunks(n, threads, [&](int lo, int hi, int tid) {
    std::vector<double> p(size_t(pre.J));
    Eigen::VectorXd r(dt), b(d), m(d);
    Eigen::MatrixXd& C = cov[size_t(tid)];
    Eigen::VectorXd& W = mass[size_t(tid)];
    for (int i = lo; i < hi; ++i) {
      const double* y = batch.y.data() + size_t(i) * dt;
      posterior(pre, y, inv2s2, p);
      m.setZero();
      for (int j = 0; j < pre.J; ++j) {
        const double pj = p[size_t(j)];
        if (pj == 0.0) continue;
        W[j] += pj;
        const double* c = pre.centers.data() + size_t(j) * dt;
        for (int t = 0; t < dt; ++t) r[t] = y[t] - c[t];
        const double* At = pre.at(j);
        for (int a = 0; a < d; ++a)
          b[a] = kern::dot(At + size_t(a) * dt, r.data(), size_t(dt));
        kern::rank1_update(pj, b.data(), C.data(), size_t(d));
        kern::axpy(pj, b.data(), m.data(), size_t(d));
      }
      kern::rank1_update(-1.0, m.data(), C.data(), size_t(d));
    }
  });
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd W = Eigen::VectorXd::Zero(pre.J);
  for (int t = 0; t < T; ++t) {
    C += cov[size_t(t)];
    W += mass[size_t(t)];
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < pre.J; ++j)
    if (W[j] != 0.0)
      H += W[j] * Eigen::Map<const Eigen::MatrixXd>(pre.gr(j), d, d);
  H /= (double(n) * s2);
  H -= C / (double(n) * s2 * s2);
  // Symmetrize away accumulation round-off.
  return 0.5 * (H + H.transpose());
}

Eigen::MatrixXd observed_fisher(const ModelSpec& model,
                                const Eigen::VectorXd& theta_star,
                                const SampleBatch& batch,
                                const group::QuadratureRule& rule, int threads) {
  return nll_hessian(model, theta_star, batch, rule, threads);
}

namespace {

double percentile(const std::vector<double>& sorted_desc, int pct) {
  if (sorted_desc.empty()) return 0.0;
  // pct-th percentile of the ascending order = (100-pct) from the top
  double pos = (100.0 - pct) / 100.0 * double(sorted_desc.size() - 1);
  int i0 = int(std::floor(pos));
  int i1 = std::min<int>(i0 + 1, int(sorted_desc.size()) - 1);
  double f = pos - i0;
  return sorted_desc[size_t(i0)] * (1.0 - f) + sorted_desc[size_t(i1)] * f;
}

}  // namespace

SpectrumReport tier_scaling(const ModelSpec& model,
                            const Eigen::VectorXd& theta_star,
                            const std::vector<double>& alpha_grid, int n,
                            const group::QuadratureRule& rule, uint64_t seed,
                            int threads) {
  if (alpha_grid.size() < 3)
    throw std::invalid_argument("tier_scaling: need an alpha grid of >= 3 points");
  for (double a : alpha_grid)
    if (!(a > 0)) throw std::invalid_argument("tier_scaling: alpha > 0");
  {
    double lo = *std::min_element(alpha_grid.begin(), alpha_grid.end());
    double hi = *std::max_element(alpha_grid.begin(), alpha_grid.end());
    if (lo == hi)
      throw std::invalid_argument("tier_scaling: degenerate alpha grid");
  }
  auto t0 = std::chrono::steady_clock::now();
  SpectrumReport rep;
  rep.model = model;
  rep.ledger = models::predicted_dims(model);
  rep.alphas = alpha_grid;
  const double norm = theta_star.norm();
  const auto tiers = rep.ledger.tiers();
  for (size_t a = 0; a < alpha_grid.size(); ++a) {
    double sigma = std::sqrt(alpha_grid[a]) * norm;
    SampleBatch batch = generate(model, theta_star, sigma, n, rule,
                                 SeedStream(seed).split(a).next_u64());
    Eigen::MatrixXd H = observed_fisher(model, theta_star, batch, rule, threads);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    Eigen::VectorXd ev = es.eigenvalues().reverse();  // descending
    rep.eigenvalues.push_back(ev);
    std::vector<std::array<double, 5>> per_tier;
    int pos = 0;
    for (int tk : tiers) {
      std::vector<double> vals(ev.data() + pos, ev.data() + pos + tk);
      std::array<double, 5> pcts{};
      for (size_t p = 0; p < SpectrumReport::kPercentiles.size(); ++p)
        pcts[p] = percentile(vals, SpectrumReport::kPercentiles[p]);
      per_tier.push_back(pcts);
      pos += tk;
    }
    rep.track.push_back(per_tier);
  }
  // Per-tier slope of log(median) against log(1/alpha).
  const int nT = int(tiers.size());
  for (int t = 0; t < nT; ++t) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = int(alpha_grid.size());
    std::vector<double> xs(static_cast<size_t>(m)), ys(static_cast<size_t>(m));
    for (int a = 0; a < m; ++a) {
      xs[size_t(a)] = std::log(1.0 / alpha_grid[size_t(a)]);
      ys[size_t(a)] = std::log(rep.track[size_t(a)][size_t(t)][2]);  // median
      sx += xs[size_t(a)];
      sy += ys[size_t(a)];
      sxx += xs[size_t(a)] * xs[size_t(a)];
      sxy += xs[size_t(a)] * ys[size_t(a)];
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double intercept = (sy - slope * sx) / m;
    double resid = 0;
    for (int a = 0; a < m; ++a)
      resid = std::max(resid,
                       std::abs(ys[size_t(a)] - slope * xs[size_t(a)] - intercept));
    rep.slopes.push_back(slope);
    rep.residuals.push_back(resid);
  }
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

void SpectrumReport::write_csv(std::ostream& os) const {
  os << "alpha,tier,percentile,eigenvalue\n";
  char buf[128];
  for (size_t a = 0; a < alphas.size(); ++a)
    for (size_t t = 0; t < track[a].size(); ++t)
      for (size_t p = 0; p < kPercentiles.size(); ++p) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g\n", alphas[a],
                      int(t) + 1, kPercentiles[p], track[a][t][p]);
        os << buf;
      }
}

nlohmann::json SpectrumReport::summary_json() const {
  nlohmann::json j;
  j["model"] = model.to_json();
  j["tiers"] = ledger.tiers();
  j["d0"] = ledger.d0;
  j["alphas"] = alphas;
  j["slopes"] = slopes;
  j["residuals"] = residuals;
  j["runtime_seconds"] = runtime_seconds;
  return j;
}

void SampleBatch::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("SampleBatch::save: cannot open " + path);
  nlohmann::json hdr;
  hdr["model"] = model.to_json();
  hdr["n"] = n();
  hdr["dt"] = int(y.cols());
  char sig[32];
  std::snprintf(sig, sizeof sig, "%.17g", sigma);
  hdr["sigma"] = std::string(sig);
  hdr["seed"] = seed;
  std::string h = hdr.dump();
  const char magic[4] = {'O', 'R', 'B', '1'};
  uint32_t hlen = uint32_t(h.size());
  f.write(magic, 4);
  f.write(reinterpret_cast<const char*>(&hlen), 4);
  f.write(h.data(), std::streamsize(h.size()));
  f.write(reinterpret_cast<const char*>(y.data()),
          std::streamsize(sizeof(double) * size_t(y.size())));
  std::vector<int32_t> nodes(hidden_nodes.begin(), hidden_nodes.end());
  f.write(reinterpret_cast<const char*>(nodes.data()),
          std::streamsize(sizeof(int32_t) * nodes.size()));
}

SampleBatch SampleBatch::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("SampleBatch::load: cannot open " + path);
  char magic[4];
  uint32_t hlen = 0;
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&hlen), 4);
  if (std::memcmp(magic, "ORB1", 4) != 0)
    throw std::runtime_error("SampleBatch::load: bad magic");
  std::string h(hlen, '\0');
  f.read(h.data(), hlen);
  nlohmann::json hdr = nlohmann::json::parse(h);
  SampleBatch out;
  out.model = models::ModelSpec::from_json(hdr.at("model"));
  out.sigma = std::stod(hdr.at("sigma").get<std::string>());
  out.seed = hdr.at("seed").get<uint64_t>();
  int n = hdr.at("n").get<int>(), dt = hdr.at("dt").get<int>();
  out.y.resize(n, dt);
  f.read(reinterpret_cast<char*>(out.y.data()),
         std::streamsize(sizeof(double) * size_t(n) * size_t(dt)));
  std::vector<int32_t> nodes(static_cast<size_t>(n));
  f.read(reinterpret_cast<char*>(nodes.data()),
         std::streamsize(sizeof(int32_t) * nodes.size()));
  out.hidden_nodes.assign(nodes.begin(), nodes.end());
  if (!f) throw std::runtime_error("SampleBatch::load: truncated file");
  return out;
}

}  // namespace orbit::likelihood
