#include "orbitrec/kernels.hpp"

#include <atomic>

namespace orbit::kern {

namespace ref {

double dot(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
  }
  if (i < n) s0 += x[i] * y[i];
  return s0 + s1;
}

double sq_dist(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    double d0 = x[i] - y[i];
    double d1 = x[i + 1] - y[i + 1];
    s0 += d0 * d0;
    s1 += d1 * d1;
  }
  if (i < n) {
    double d = x[i] - y[i];
    s0 += d * d;
  }
  return s0 + s1;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void rank1_update(double w, const double* v, double* h, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i) {
    const double wv = w * v[i];
    double* row = h + i * d;
    for (std::size_t j = 0; j < d; ++j) row[j] += wv * v[j];
  }
}

}  // namespace ref

#if defined(__x86_64__) || defined(_M_X64)
#define ORBITREC_X86 1
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
double sq_dist(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void rank1_update(double w, const double* v, double* h, std::size_t d);
bool supported();
}  // namespace avx2
#endif

namespace {

struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sq_dist)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*rank1_update)(double, const double*, double*, std::size_t);
  const char* isa;
};

constexpr Vtable kScalar{ref::dot, ref::sq_dist, ref::axpy, ref::rank1_update,
                         "scalar"};

std::atomic<bool> g_force_scalar{false};

const Vtable& table() {
  static const Vtable probed = [] {
#ifdef ORBITREC_X86
    if (avx2::supported())
      return Vtable{avx2::dot, avx2::sq_dist, avx2::axpy, avx2::rank1_update,
                    "avx2"};
#endif
    return kScalar;
  }();
  return g_force_scalar.load(std::memory_order_relaxed) ? kScalar : probed;
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
  return table().dot(x, y, n);
}
double sq_dist(const double* x, const double* y, std::size_t n) {
  return table().sq_dist(x, y, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
  table().axpy(a, x, y, n);
}
void rank1_update(double w, const double* v, double* h, std::size_t d) {
  table().rank1_update(w, v, h, d);
}
const char* active_isa() { return table().isa; }
void force_scalar(bool on) {
  g_force_scalar.store(on, std::memory_order_relaxed);
}

}  // namespace orbit::kern
