#pragma once

#include <cstddef>
#include <string_view>

// Hot loops of the engine. Every variant produces bit-identical results to the
// scalar reference: reductions use a fixed four-lane order and no fused
// multiply-add is emitted, so switching the ISA never changes an experiment.
namespace ripbench::kernels {

struct AdamCoef {
  double lr;
  double beta1;
  double beta2;
  double bias1;  // 1 - beta1^t
  double bias2;  // 1 - beta2^t
  double eps;
};

struct Table {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out = a*x + b*y; out may alias x or y.
  void (*axpby)(double* out, double a, const double* x, double b, const double* y, std::size_t n);
  // out = x + s*z; out may alias x.
  void (*add_scaled)(double* out, const double* x, double s, const double* z, std::size_t n);
  void (*adam)(double* p, double* m, double* v, const double* g, std::size_t n, const AdamCoef& c);
};

const Table& scalar();
// nullptr when the build has no AVX2 variant or the CPU lacks it.
const Table* avx2();

// Chosen once: best supported table unless RIPBENCH_KERNELS=scalar.
const Table& active();
// Test hook; pass nullptr to restore automatic selection.
void force(const Table* t);

}  // namespace ripbench::kernels
