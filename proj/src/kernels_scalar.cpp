#include <cmath>
#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"
#include "ripbench/kernels.hpp"

namespace ripbench::kernels {
namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (std::size_t l = 0; l < 4; ++l) acc[l] += a[i + l] * b[i + l];
  double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpby_ref(double* out, double a, const double* x, double b, const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void add_scaled_ref(double* out, const double* x, double s, const double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + s * z[i];
}

void adam_ref(double* p, double* m, double* v, const double* g, std::size_t n, const AdamCoef& c) {
  const double om1 = 1.0 - c.beta1;
  const double om2 = 1.0 - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = c.beta1 * m[i] + om1 * g[i];
    v[i] = c.beta2 * v[i] + om2 * (g[i] * g[i]);
    double mh = m[i] / c.bias1;
    double vh = v[i] / c.bias2;
    p[i] = p[i] - (c.lr * mh) / (std::sqrt(vh) + c.eps);
  }
}

const Table kScalar{"scalar", dot_ref, axpby_ref, add_scaled_ref, adam_ref};
const Table* g_forced = nullptr;

const Table& pick() {
  const char* env = std::getenv("RIPBENCH_KERNELS");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return kScalar;
  if (const Table* t = avx2()) return *t;
  return kScalar;
}

}  // namespace

const Table& scalar() { return kScalar; }

const Table* avx2() {
#if RIPBENCH_HAVE_AVX2
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() {
  if (g_forced != nullptr) return *g_forced;
  static const Table& chosen = pick();
  return chosen;
}

void force(const Table* t) { g_forced = t; }

}  // namespace ripbench::kernels
