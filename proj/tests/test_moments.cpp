#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "orbitrec/moments.hpp"
#include "orbitrec/transforms.hpp"
#include "testutil.hpp"

using namespace orbit;
using namespace orbit::models;
using namespace orbit::moments;

namespace {

struct Case {
  ModelSpec model;
  group::QuadratureRule rule;
};

std::vector<Case> oracle_cases() {
  std::vector<Case> cases;
  cases.push_back({make_model(ModelKind::mra, 4), group::so2_rule(16)});
  cases.push_back({make_model(ModelKind::mra_projected, 4), group::so2_rule(16)});
  cases.push_back({make_model(ModelKind::sphere, 3), group::so3_rule(10, 10, 10)});
  cases.push_back(
      {make_model(ModelKind::cryo, 2, {2, 2, 2}), group::so3_rule(7, 7, 7)});
  cases.push_back({make_model(ModelKind::cryo_projected, 1, {4, 4}),
                   group::so3_rule(6, 6, 6)});
  cases.push_back(
      {make_model(ModelKind::procrustes, 0, {}, 4), group::so3_rule(4, 4, 4)});
  return cases;
}

}  // namespace

TEST_CASE("closed forms match the quadrature oracle on all models") {
  SeedStream s(101);
  for (auto& c : oracle_cases()) {
    CAPTURE(kind_name(c.model.kind));
    for (int pair = 0; pair < 5; ++pair) {
      Eigen::VectorXd theta = testutil::random_vec(c.model.dim(), s);
      Eigen::VectorXd star = testutil::random_vec(c.model.dim(), s);
      for (int k = 1; k <= 3; ++k) {
        double closed = s_closed(c.model, theta, star, k).value;
        double oracle = s_oracle(c.model, theta, star, k, c.rule).value;
        CHECK(std::abs(closed - oracle) / std::max(1.0, std::abs(oracle)) <=
              1e-6);
      }
    }
  }
}

TEST_CASE("series terms vanish at theta = theta_star and are symmetric") {
  SeedStream s(102);
  for (auto& c : oracle_cases()) {
    Eigen::VectorXd star = testutil::random_vec(c.model.dim(), s);
    Eigen::VectorXd theta = testutil::random_vec(c.model.dim(), s);
    for (int k = 1; k <= 3; ++k) {
      CHECK(s_closed(c.model, star, star, k).value == doctest::Approx(0.0));
      double ab = s_closed(c.model, theta, star, k).value;
      double ba = s_closed(c.model, star, theta, k).value;
      CHECK(std::abs(ab - ba) <= 1e-12 * std::max(1.0, std::abs(ab)));
      CHECK(ab >= 0.0);
    }
  }
}

TEST_CASE("closed-form gradients match finite differences") {
  SeedStream s(103);
  for (auto& c : oracle_cases()) {
    CAPTURE(kind_name(c.model.kind));
    Eigen::VectorXd star = testutil::random_vec(c.model.dim(), s);
    Eigen::VectorXd theta = testutil::random_vec(c.model.dim(), s);
    for (int k = 1; k <= 3; ++k) {
      auto term = s_closed(c.model, theta, star, k);
      auto fd = testutil::fd_gradient(
          [&](const Eigen::VectorXd& x) {
            return s_closed(c.model, x, star, k).value;
          },
          theta);
      double scale = std::max(1.0, fd.norm());
      CHECK((term.gradient - fd).norm() / scale < 1e-6);
    }
  }
}

TEST_CASE("hand-evaluated mra second moment example") {
  // L = 1, theta* = (1,1,0), theta = (1,0,1): same mean, same power
  auto model = make_model(ModelKind::mra, 1);
  Eigen::VectorXd star(3), theta(3);
  star << 1, 1, 0;
  theta << 1, 0, 1;
  CHECK(s_closed(model, theta, star, 2).value == doctest::Approx(0.0));
  CHECK(s_closed(model, theta, star, 1).value == doctest::Approx(0.0));
}

TEST_CASE("procrustes oracle closed forms") {
  SeedStream s(104);
  auto model = make_model(ModelKind::procrustes, 0, {}, 5);
  auto rule = group::so3_rule(6, 6, 6);
  Eigen::VectorXd theta = testutil::random_vec(model.dim(), s);
  Eigen::VectorXd star = testutil::random_vec(model.dim(), s);
  Eigen::Map<const Eigen::Matrix<double, 3, Eigen::Dynamic>> X(theta.data(), 3, 5);
  Eigen::Map<const Eigen::Matrix<double, 3, Eigen::Dynamic>> Y(star.data(), 3, 5);
  double expect =
      (X.transpose() * X - Y.transpose() * Y).squaredNorm() / 12.0;
  CHECK(s_oracle(model, theta, star, 2, rule).value ==
        doctest::Approx(expect).epsilon(1e-9));
  CHECK(s_closed(model, theta, star, 2).value ==
        doctest::Approx(expect).epsilon(1e-12));
  CHECK(s_oracle(model, theta, star, 1, rule).value ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("bispectrum: zeros, reality, parity") {
  SeedStream s(105);
  // zero input
  auto cryo = make_model(ModelKind::cryo, 2, {2, 2, 2});
  CHECK(bispectrum(cryo, Eigen::VectorXd::Zero(cryo.dim()))
            .values.cwiseAbs()
            .maxCoeff() == 0.0);
  // cryo values real at random real theta
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd theta = testutil::random_vec(cryo.dim(), s);
    CHECK(bispectrum(cryo, theta).values.imag().cwiseAbs().maxCoeff() <= 1e-12);
  }
  // sphere parity: B = (-1)^{l+l'+l''} conj(B)
  auto sph = make_model(ModelKind::sphere, 3);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd theta = testutil::random_vec(sph.dim(), s);
    auto bv = bispectrum(sph, theta);
    for (size_t i = 0; i < bv.index.size(); ++i) {
      const auto& T = bv.index[i];
      auto v = bv.values[Eigen::Index(i)];
      double sgn = (T.l + T.lp + T.lpp) % 2 == 0 ? 1.0 : -1.0;
      CHECK(std::abs(v - sgn * std::conj(v)) < 1e-12);
    }
  }
}

TEST_CASE("bispectrum is orbit-invariant; s_closed too") {
  SeedStream s(106);
  auto model = make_model(ModelKind::cryo, 1, {2, 2});
  Eigen::VectorXd theta = testutil::random_vec(model.dim(), s);
  Eigen::VectorXd star = testutil::random_vec(model.dim(), s);
  for (int t = 0; t < 10; ++t) {
    auto g = group::GroupElement::so3(s.uniform() * kTwoPi, s.uniform() * kPi,
                                      s.uniform() * kTwoPi);
    Eigen::VectorXd rot = group::act(model, g, theta);
    auto b0 = bispectrum(model, theta).values;
    auto b1 = bispectrum(model, rot).values;
    CHECK((b0 - b1).cwiseAbs().maxCoeff() <= 1e-9);
    for (int k = 1; k <= 3; ++k) {
      double v0 = s_closed(model, theta, star, k).value;
      double v1 = s_closed(model, rot, star, k).value;
      CHECK(std::abs(v0 - v1) <= 1e-9 * std::max(1.0, v0));
    }
  }
}

TEST_CASE("mra second moment ignores phases") {
  SeedStream s(107);
  auto model = make_model(ModelKind::mra, 4);
  Eigen::VectorXd star = testutil::random_vec(model.dim(), s);
  Eigen::VectorXd theta = testutil::random_vec(model.dim(), s);
  // randomize phases at fixed magnitudes
  Eigen::VectorXd theta2 = theta;
  for (int l = 1; l <= 4; ++l) {
    double a = theta[model.mra_offset(l, 1)], b = theta[model.mra_offset(l, 2)];
    double r = std::hypot(a, b), phi = s.uniform() * kTwoPi;
    theta2[model.mra_offset(l, 1)] = r * std::cos(phi);
    theta2[model.mra_offset(l, 2)] = r * std::sin(phi);
  }
  double v1 = s_closed(model, theta, star, 2).value;
  double v2 = s_closed(model, theta2, star, 2).value;
  CHECK(std::abs(v1 - v2) <= 1e-12 * std::max(1.0, v1));
}

TEST_CASE("moment-mismatch Hessians: PSD, rank, finite differences") {
  SeedStream s(108);
  for (auto& c : oracle_cases()) {
    CAPTURE(kind_name(c.model.kind));
    Eigen::VectorXd star = testutil::random_vec(c.model.dim(), s);
    for (int k = 1; k <= 3; ++k) {
      Eigen::MatrixXd H = s_hessian_at_star(c.model, star, k);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
  }
  // finite-difference agreement on (sphere, L = 3) at 5 random points
  auto sph = make_model(ModelKind::sphere, 3);
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd star = testutil::random_vec(sph.dim(), s);
    for (int k = 1; k <= 3; ++k) {
      Eigen::MatrixXd H = s_hessian_at_star(sph, star, k);
      Eigen::MatrixXd FD = testutil::fd_hessian(
          [&](const Eigen::VectorXd& x) {
            return s_closed(sph, x, star, k).value;
          },
          star, 1e-4);
      double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
      CHECK((H - FD).cwiseAbs().maxCoeff() / scale < 1e-5);
    }
  }
  // mra: rank of the first-order Hessian is 1
  auto mra = make_model(ModelKind::mra, 3);
  Eigen::VectorXd star = testutil::random_vec(mra.dim(), s);
  Eigen::MatrixXd H1 = s_hessian_at_star(mra, star, 1);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(H1);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-12 * svd.singularValues()[0]) ++rank;
  CHECK(rank == 1);
}

TEST_CASE("bispectrum CSV export") {
  SeedStream s(109);
  auto model = make_model(ModelKind::sphere, 2);
  auto bv = bispectrum(model, testutil::random_vec(model.dim(), s));
  std::ostringstream os;
  bv.write_csv(os);
  std::string text = os.str();
  CHECK(text.find("l,s,lp,sp,lpp,spp,re,im") == 0);
  size_t lines = size_t(std::count(text.begin(), text.end(), '\n'));
  CHECK(lines == bv.index.size() + 1);
}

TEST_CASE("oracle rejects an under-resolved rule") {
  SeedStream s(110);
  auto model = make_model(ModelKind::mra, 4);
  Eigen::VectorXd a = testutil::random_vec(model.dim(), s);
  Eigen::VectorXd b = testutil::random_vec(model.dim(), s);
  CHECK_THROWS_AS(s_oracle(model, a, b, 3, group::so2_rule(4)),
                  std::invalid_argument);
}
