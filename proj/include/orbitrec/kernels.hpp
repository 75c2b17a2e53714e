#pragma once

#include <cstddef>

// Data-parallel inner loops of the likelihood/moment accumulations.
// Each kernel has a scalar reference implementation (kern::ref) and, on
// x86-64 with AVX2+FMA, a vectorized variant selected once at runtime.
// The dispatched entry points and the reference must agree to rounding;
// tests/test_kernels.cpp pins the equivalence.
namespace orbit::kern {

double dot(const double* x, const double* y, std::size_t n);
double sq_dist(const double* x, const double* y, std::size_t n);
// y += a*x
void axpy(double a, const double* x, double* y, std::size_t n);
// h (d*d, row-major) += w * v * v^T
void rank1_update(double w, const double* v, double* h, std::size_t d);

namespace ref {
double dot(const double* x, const double* y, std::size_t n);
double sq_dist(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void rank1_update(double w, const double* v, double* h, std::size_t d);
}  // namespace ref

// "avx2" or "scalar"; resolved on first kernel call.
const char* active_isa();
// Test hook: pin dispatch to the scalar path (true) or re-probe (false).
void force_scalar(bool on);

}  // namespace orbit::kern
