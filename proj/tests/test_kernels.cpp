#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "orbitrec/common.hpp"
#include "orbitrec/kernels.hpp"

using namespace orbit;

namespace {
std::vector<double> rand_vec(size_t n, SeedStream& s) {
  std::vector<double> v(n);
  for (auto& x : v) x = s.normal();
  return v;
}
}  // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
  SeedStream s(41);
  INFO("active isa: ", kern::active_isa());
  for (size_t n : {0, 1, 3, 4, 7, 8, 11, 16, 33, 64, 67, 129}) {
    auto x = rand_vec(n, s), y = rand_vec(n, s);
    CHECK(kern::dot(x.data(), y.data(), n) ==
          doctest::Approx(kern::ref::dot(x.data(), y.data(), n))
              .epsilon(1e-13));
    CHECK(kern::sq_dist(x.data(), y.data(), n) ==
          doctest::Approx(kern::ref::sq_dist(x.data(), y.data(), n))
              .epsilon(1e-13));
    auto y1 = y, y2 = y;
    kern::axpy(0.37, x.data(), y1.data(), n);
    kern::ref::axpy(0.37, x.data(), y2.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]));
  }
}

TEST_CASE("rank1_update equals dense outer-product accumulation") {
  SeedStream s(42);
  for (size_t d : {1, 2, 5, 11, 18}) {
    auto v = rand_vec(d, s);
    std::vector<double> h1(d * d, 0.1), h2 = h1;
    kern::rank1_update(0.83, v.data(), h1.data(), d);
    kern::ref::rank1_update(0.83, v.data(), h2.data(), d);
    for (size_t i = 0; i < d * d; ++i)
      CHECK(h1[i] == doctest::Approx(h2[i]).epsilon(1e-13));
    // symmetry
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j)
        CHECK(h1[i * d + j] == doctest::Approx(h1[j * d + i]));
  }
}

TEST_CASE("force_scalar pins the reference path") {
  kern::force_scalar(true);
  CHECK(std::string(kern::active_isa()) == "scalar");
  kern::force_scalar(false);
}

TEST_CASE("seed streams are deterministic and splittable") {
  SeedStream a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  SeedStream c = SeedStream(7).split(3), d = SeedStream(7).split(4);
  CHECK(c.next_u64() != d.next_u64());
  // normal() has roughly unit variance
  SeedStream e(11);
  double m = 0, v = 0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    double x = e.normal();
    m += x;
    v += x * x;
  }
  m /= N;
  v = v / N - m * m;
  CHECK(std::abs(m) < 0.03);
  CHECK(std::abs(v - 1.0) < 0.05);
}
