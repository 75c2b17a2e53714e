#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "orbitrec/models.hpp"
#include "orbitrec/transforms.hpp"
#include "testutil.hpp"

using namespace orbit;
using namespace orbit::models;

TEST_CASE("dimensions per kind") {
  CHECK(make_model(ModelKind::mra, 5).dim() == 11);
  CHECK(make_model(ModelKind::sphere, 10).dim() == 121);
  CHECK(make_model(ModelKind::cryo, 2, {2, 2, 2}).dim() == 18);
  CHECK(make_model(ModelKind::procrustes, 0, {}, 5).dim() == 15);
  CHECK(make_model(ModelKind::mra_projected, 4).proj_dim() == 5);
  CHECK(make_model(ModelKind::cryo_projected, 1, {4, 4}).proj_dim() == 12);
  CHECK_THROWS_AS(make_model(ModelKind::mra, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_model(ModelKind::cryo, 1, {2}), std::invalid_argument);
  CHECK_THROWS_AS(make_model(ModelKind::procrustes, 0, {}, 2),
                  std::invalid_argument);
}

TEST_CASE("model descriptors round-trip through JSON") {
  auto m = make_model(ModelKind::cryo_projected, 2, {4, 5, 4});
  auto back = ModelSpec::from_json(m.to_json());
  CHECK(back.kind == m.kind);
  CHECK(back.L == m.L);
  CHECK(back.S == m.S);
}

TEST_CASE("predicted dimension ledgers") {
  auto led = predicted_dims(make_model(ModelKind::mra, 5));
  CHECK(led.d0 == 1);
  CHECK(led.d1 == 1);
  CHECK(led.d2 == 5);
  CHECK(led.d3 == 4);
  CHECK(led.K == 3);

  auto sph = predicted_dims(make_model(ModelKind::sphere, 10));
  CHECK(sph.d0 == 3);
  CHECK(sph.d1 == 1);
  CHECK(sph.d2 == 10);
  CHECK(sph.d3 == 107);
  CHECK(sph.cum(3) == 118);

  auto cry = predicted_dims(make_model(ModelKind::cryo, 2, {2, 2, 2}));
  CHECK(cry.d0 == 3);
  CHECK(cry.d1 == 2);
  CHECK(cry.d2 == 6);
  CHECK(cry.d3 == 7);

  auto cp = predicted_dims(make_model(ModelKind::cryo_projected, 1, {4, 4}));
  CHECK(cp.d1 == 4);
  CHECK(cp.cum(2) == 13);
  CHECK(cp.cum(3) == 13);
  CHECK(cp.K == 2);

  auto pro = predicted_dims(make_model(ModelKind::procrustes, 0, {}, 5));
  CHECK(pro.d0 == 3);
  CHECK(pro.d1 == 0);
  CHECK(pro.d2 == 12);
  CHECK(pro.K == 2);

  // refusals name the failed bound
  CHECK_THROWS_AS(predicted_dims(make_model(ModelKind::sphere, 5)),
                  HypothesisError);
  CHECK_THROWS_AS(
      predicted_dims(make_model(ModelKind::cryo_projected, 1, {2, 2})),
      HypothesisError);
  CHECK_THROWS_AS(predicted_dims(make_model(ModelKind::cryo, 1, {1, 2})),
                  HypothesisError);
}

TEST_CASE("ledgers sum to d across a model grid") {
  std::vector<ModelSpec> grid;
  for (int L = 1; L <= 8; ++L) grid.push_back(make_model(ModelKind::mra, L));
  for (int L = 1; L <= 6; ++L)
    grid.push_back(make_model(ModelKind::mra_projected, L));
  for (int L = 10; L <= 12; ++L)
    grid.push_back(make_model(ModelKind::sphere, L));
  grid.push_back(make_model(ModelKind::cryo, 1, {2, 2}));
  grid.push_back(make_model(ModelKind::cryo, 2, {2, 2, 2}));
  grid.push_back(make_model(ModelKind::cryo, 2, {3, 3, 3}));
  grid.push_back(make_model(ModelKind::cryo_projected, 1, {4, 4}));
  grid.push_back(make_model(ModelKind::cryo_projected, 2, {4, 4, 4}));
  for (int m = 3; m <= 8; ++m)
    grid.push_back(make_model(ModelKind::procrustes, 0, {}, m));
  for (const auto& model : grid)
    CHECK(predicted_dims(model).total() == model.dim());
}

TEST_CASE("moment tensors: procrustes closed forms") {
  SeedStream s(61);
  auto model = make_model(ModelKind::procrustes, 0, {}, 4);
  Eigen::VectorXd theta = testutil::random_vec(model.dim(), s);
  auto rule = group::so3_rule(8, 8, 8);
  auto stack = moment_tensor(model, theta, 2, rule);
  // T_1 = 0
  CHECK(stack.tensors[0].cwiseAbs().maxCoeff() < 1e-12);
  // T_2 = (1/3) Id_3 (x) theta^T theta
  Eigen::Map<const Eigen::Matrix<double, 3, Eigen::Dynamic>> X(theta.data(), 3,
                                                               4);
  Eigen::MatrixXd gram = X.transpose() * X;
  const int d = model.dim();
  Eigen::Map<const Eigen::MatrixXd> T2(stack.tensors[1].data(), d, d);
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 3; ++i)
      for (int b = 0; b < 4; ++b)
        for (int j = 0; j < 3; ++j) {
          double expect = i == j ? gram(a, b) / 3.0 : 0.0;
          CHECK(T2(3 * a + i, 3 * b + j) ==
                doctest::Approx(expect).epsilon(0).scale(1.0).epsilon(1e-10));
        }
}

TEST_CASE("moment tensors: mra mean and orbit invariance") {
  SeedStream s(62);
  auto model = make_model(ModelKind::mra, 3);
  Eigen::VectorXd theta = testutil::random_vec(model.dim(), s);
  auto rule = group::so2_rule(32);
  auto stack = moment_tensor(model, theta, 3, rule);
  CHECK(stack.tensors[0][0] == doctest::Approx(theta[0]).epsilon(1e-12));
  CHECK(stack.tensors[0].tail(model.dim() - 1).cwiseAbs().maxCoeff() < 1e-14);

  // invariance under theta -> act(g, theta)
  auto g = group::GroupElement::so2(0.37);
  auto stack2 = moment_tensor(model, group::act(model, g, theta), 3, rule);
  for (int k = 0; k < 3; ++k)
    CHECK((stack.tensors[size_t(k)] - stack2.tensors[size_t(k)])
              .cwiseAbs()
              .maxCoeff() < 1e-9);
}

TEST_CASE("projected moment tensor equals tensor of projected samples") {
  SeedStream s(63);
  auto model = make_model(ModelKind::cryo_projected, 1, {2, 2});
  Eigen::VectorXd theta = testutil::random_vec(model.dim(), s);
  auto rule = group::so3_rule(6, 6, 6);
  auto stack = moment_tensor(model, theta, 2, rule);
  // direct accumulation
  const int e = model.proj_dim();
  Eigen::VectorXd t1 = Eigen::VectorXd::Zero(e);
  Eigen::MatrixXd t2 = Eigen::MatrixXd::Zero(e, e);
  for (size_t j = 0; j < rule.nodes.size(); ++j) {
    Eigen::VectorXd y = observe(model, rule.nodes[j], theta);
    t1 += rule.weights[j] * y;
    t2 += rule.weights[j] * y * y.transpose();
  }
  CHECK((stack.tensors[0] - t1).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::Map<const Eigen::MatrixXd> T2(stack.tensors[1].data(), e, e);
  CHECK((T2 - t2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("moment tensor guard rails") {
  SeedStream s(64);
  auto big = make_model(ModelKind::sphere, 10);  // d = 121 > 64
  Eigen::VectorXd theta = testutil::random_vec(big.dim(), s);
  auto rule = group::so3_rule(4, 4, 4);
  CHECK_THROWS_AS(moment_tensor(big, theta, 3, rule), std::invalid_argument);
  std::ostringstream warn;
  auto small = make_model(ModelKind::mra, 4);
  moment_tensor(small, testutil::random_vec(small.dim(), s), 3, group::so2_rule(4),
                &warn);
  CHECK(!warn.str().empty());
}
