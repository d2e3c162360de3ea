#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "ripbench/core.hpp"
#include "ripbench/kernels.hpp"

using namespace ripbench;

namespace {

std::vector<double> randvec(RngStream& r, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = r.normal() * scale;
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

const kernels::Table* simd_or_skip() { return kernels::avx2(); }

}  // namespace

TEST(KernelsScalar, DotMatchesNaiveSum) {
  RngStream r(1, 0);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 16u, 17u, 100u}) {
    auto a = randvec(r, n), b = randvec(r, n);
    double naive = 0.0;
    for (std::size_t i = 0; i < n; ++i) naive += a[i] * b[i];
    EXPECT_NEAR(kernels::scalar().dot(a.data(), b.data(), n), naive, 1e-12 * (1.0 + n));
  }
}

TEST(KernelsScalar, AdamFirstStepMovesByLr) {
  double p = 0.0, m = 0.0, v = 0.0, g = 1.0;
  kernels::AdamCoef c{1e-3, 0.9, 0.999, 1.0 - 0.9, 1.0 - 0.999, 1e-8};
  kernels::scalar().adam(&p, &m, &v, &g, 1, c);
  EXPECT_NEAR(p, -1e-3, 1e-10);
}

TEST(KernelsAvx2, BitIdenticalToScalar) {
  const kernels::Table* simd = simd_or_skip();
  if (simd == nullptr) GTEST_SKIP() << "no AVX2 on this machine";
  const auto& ref = kernels::scalar();
  RngStream r(2, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = r.below(70);
    auto a = randvec(r, n, 3.0), b = randvec(r, n, 3.0);
    const double x = ref.dot(a.data(), b.data(), n), y = simd->dot(a.data(), b.data(), n);
    ASSERT_EQ(std::memcmp(&x, &y, sizeof x), 0) << "dot n=" << n;

    const double s = r.normal(), t = r.normal();
    std::vector<double> o1(n), o2(n);
    ref.axpby(o1.data(), s, a.data(), t, b.data(), n);
    simd->axpby(o2.data(), s, a.data(), t, b.data(), n);
    ASSERT_TRUE(bit_equal(o1, o2)) << "axpby n=" << n;

    ref.add_scaled(o1.data(), a.data(), s, b.data(), n);
    simd->add_scaled(o2.data(), a.data(), s, b.data(), n);
    ASSERT_TRUE(bit_equal(o1, o2)) << "add_scaled n=" << n;

    auto p1 = randvec(r, n), m1 = randvec(r, n, 0.1), v1 = randvec(r, n, 0.1), g = randvec(r, n);
    for (double& vv : v1) vv = vv * vv;
    auto p2 = p1, m2 = m1, v2 = v1;
    const long step = 1 + static_cast<long>(r.below(50));
    kernels::AdamCoef c{1e-3, 0.9, 0.999, 1.0 - std::pow(0.9, step), 1.0 - std::pow(0.999, step), 1e-8};
    ref.adam(p1.data(), m1.data(), v1.data(), g.data(), n, c);
    simd->adam(p2.data(), m2.data(), v2.data(), g.data(), n, c);
    ASSERT_TRUE(bit_equal(p1, p2) && bit_equal(m1, m2) && bit_equal(v1, v2)) << "adam n=" << n;
  }
}

TEST(KernelsAvx2, InPlaceAliasing) {
  const kernels::Table* simd = simd_or_skip();
  if (simd == nullptr) GTEST_SKIP() << "no AVX2 on this machine";
  RngStream r(3, 0);
  auto a = randvec(r, 19), b = randvec(r, 19);
  auto a1 = a, a2 = a;
  kernels::scalar().add_scaled(a1.data(), a1.data(), 0.7, b.data(), a1.size());
  simd->add_scaled(a2.data(), a2.data(), 0.7, b.data(), a2.size());
  EXPECT_TRUE(bit_equal(a1, a2));
  auto c1 = a, c2 = a;
  kernels::scalar().axpby(c1.data(), 0.9, c1.data(), 0.1, b.data(), c1.size());
  simd->axpby(c2.data(), 0.9, c2.data(), 0.1, b.data(), c2.size());
  EXPECT_TRUE(bit_equal(c1, c2));
}

TEST(KernelsDispatch, ForceOverridesSelection) {
  kernels::force(&kernels::scalar());
  EXPECT_STREQ(kernels::active().name, "scalar");
  kernels::force(nullptr);
  EXPECT_NE(kernels::active().name, nullptr);
}
