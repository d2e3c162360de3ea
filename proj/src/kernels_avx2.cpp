// Built with -mavx2 only; callers reach it through kernels::avx2() after a cpuid check.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace ripbench::kernels::detail {
namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, prod);
  }
  // (l0 + l2) + (l1 + l3), same as the scalar reference.
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d pair = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpby_avx2(double* out, double a, const double* x, double b, const double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)),
                              _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void add_scaled_avx2(double* out, const double* x, double s, const double* z, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(vs, _mm256_loadu_pd(z + i))));
  for (; i < n; ++i) out[i] = x[i] + s * z[i];
}

void adam_avx2(double* p, double* m, double* v, const double* g, std::size_t n, const AdamCoef& c) {
  const double om1 = 1.0 - c.beta1;
  const double om2 = 1.0 - c.beta2;
  const __m256d b1 = _mm256_set1_pd(c.beta1), b2 = _mm256_set1_pd(c.beta2);
  const __m256d w1 = _mm256_set1_pd(om1), w2 = _mm256_set1_pd(om2);
  const __m256d bc1 = _mm256_set1_pd(c.bias1), bc2 = _mm256_set1_pd(c.bias2);
  const __m256d lr = _mm256_set1_pd(c.lr), eps = _mm256_set1_pd(c.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d gi = _mm256_loadu_pd(g + i);
    __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(w1, gi));
    __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)), _mm256_mul_pd(w2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    __m256d mh = _mm256_div_pd(mi, bc1);
    __m256d vh = _mm256_div_pd(vi, bc2);
    __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, mh), _mm256_add_pd(_mm256_sqrt_pd(vh), eps));
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = c.beta1 * m[i] + om1 * g[i];
    v[i] = c.beta2 * v[i] + om2 * (g[i] * g[i]);
    double mh = m[i] / c.bias1;
    double vh = v[i] / c.bias2;
    p[i] = p[i] - (c.lr * mh) / (__builtin_sqrt(vh) + c.eps);
  }
}

const Table kAvx2{"avx2", dot_avx2, axpby_avx2, add_scaled_avx2, adam_avx2};

}  // namespace

const Table& avx2_table() { return kAvx2; }

}  // namespace ripbench::kernels::detail
