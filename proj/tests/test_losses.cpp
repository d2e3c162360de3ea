#include <gtest/gtest.h>

#include <cmath>

#include "ripbench/losses.hpp"
#include "test_util.hpp"

using namespace ripbench;
using ripbench::testing::fd_grad;
using ripbench::testing::max_rel_err;
using ripbench::testing::random_simplex;

TEST(EntLoss, Examples) {
  EXPECT_DOUBLE_EQ(ent_loss({1.0, 0.0}), 0.0);
  EXPECT_NEAR(ent_loss({0.5, 0.5}), std::log(2.0), 1e-15);
  EXPECT_NEAR(ent_loss({0.9, 0.1}), 0.3251, 1e-4);
}

TEST(EntLoss, BoundedByLogK) {
  RngStream r(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const int K = 2 + static_cast<int>(r.below(9));
    auto q = random_simplex(r, K);
    const double h = ent_loss(q);
    ASSERT_GE(h, 0.0);
    ASSERT_LE(h, std::log(K) + 1e-12);
  }
}

TEST(CeLoss, Examples) {
  EXPECT_DOUBLE_EQ(ce_loss({0, 1, 0}, {0, 1, 0}), 0.0);
  EXPECT_NEAR(ce_loss({1, 0}, {0.5, 0.5}), std::log(2.0), 1e-15);
  EXPECT_NEAR(ce_loss({0.5, 0.5}, {0.5, 0.5}), std::log(2.0), 1e-15);
  EXPECT_THROW(ce_loss({1, 0}, {1, 0, 0}), InvalidInput);
}

TEST(CeLoss, GibbsInequality) {
  RngStream r(2, 0);
  for (int i = 0; i < 100; ++i) {
    auto p = random_simplex(r, 5), q = random_simplex(r, 5);
    ASSERT_GE(ce_loss(p, q), ent_loss(p) - 1e-12);
  }
}

TEST(SceLoss, Examples) {
  EXPECT_NEAR(sce_loss({0.5, 0.5}, {0.5, 0.5}), std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(sce_loss({0, 1}, {0, 1}), 0.0);
}

TEST(SceLoss, Symmetric) {
  RngStream r(3, 0);
  for (int i = 0; i < 100; ++i) {
    auto p = random_simplex(r, 4), q = random_simplex(r, 4);
    ASSERT_NEAR(sce_loss(p, q), sce_loss(q, p), 1e-12);
  }
}

TEST(SlrLoss, Examples) {
  EXPECT_NEAR(slr_loss({1, 0}, {0.5, 0.5}, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(slr_loss({1, 0}, {0.9, 0.1}, 1.0), -std::log(9.0), 1e-12);
  EXPECT_NEAR(slr_loss({1, 0}, {0.9, 0.1}, 1.0), -2.1972, 1e-4);
  EXPECT_DOUBLE_EQ(slr_loss({0.3, 0.7}, {0.6, 0.4}, 0.0), 0.0);
  EXPECT_THROW(slr_loss({1, 0}, {0.5, 0.5}, -1.0), InvalidInput);
}

TEST(RmtLoss, Examples) {
  ProbVector p{0.2, 0.8}, q{0.6, 0.4};
  EXPECT_NEAR(rmt_loss(p, q, q), sce_loss(p, q), 1e-15);
  EXPECT_DOUBLE_EQ(rmt_loss({1, 0}, {1, 0}, {1, 0}), 0.0);
  EXPECT_NEAR(rmt_loss({0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}), std::log(2.0), 1e-15);
}

TEST(LossGrad, CeIsQMinusP) {
  RngStream r(4, 0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> z(6);
    for (double& v : z) v = r.normal() * 3;
    auto p = random_simplex(r, 6);
    auto e = loss_grad_logits(LossKind::CE, p, z);
    auto q = softmax(z);
    for (std::size_t k = 0; k < z.size(); ++k) ASSERT_NEAR(e.grad_logits[k], q[k] - p[k], 1e-12);
    ASSERT_NEAR(e.value, ce_loss(p, q), 1e-12);
  }
}

TEST(LossGrad, EntStationaryAtUniform) {
  auto e = loss_grad_logits(LossKind::Ent, std::nullopt, {0.0, 0.0, 0.0, 0.0});
  for (double g : e.grad_logits) EXPECT_NEAR(g, 0.0, 1e-10);
  EXPECT_NEAR(e.value, std::log(4.0), 1e-12);
}

TEST(LossGrad, MissingTargetRejected) {
  for (LossKind k : {LossKind::CE, LossKind::SCE, LossKind::SLR, LossKind::RMT})
    EXPECT_THROW(loss_grad_logits(k, std::nullopt, {0.1, 0.2}), InvalidInput);
}

TEST(LossGrad, ValueMatchesLossOps) {
  RngStream r(5, 0);
  std::vector<double> z{0.3, -1.2, 2.0};
  auto q = softmax(z);
  auto p = random_simplex(r, 3);
  EXPECT_NEAR(loss_grad_logits(LossKind::Ent, std::nullopt, z).value, ent_loss(q), 1e-15);
  EXPECT_NEAR(loss_grad_logits(LossKind::SCE, p, z).value, sce_loss(p, q), 1e-15);
  EXPECT_NEAR(loss_grad_logits(LossKind::SLR, p, z, 0.7).value, slr_loss(p, q, 0.7), 1e-15);
  EXPECT_NEAR(loss_grad_logits(LossKind::RMT, p, z).value, rmt_loss(p, q, q), 1e-15);
}

class GradCheck : public ::testing::TestWithParam<std::tuple<LossKind, int>> {};

TEST_P(GradCheck, MatchesCentralDifferences) {
  const auto [kind, K] = GetParam();
  RngStream r(100 + static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(K));
  for (int i = 0; i < 100; ++i) {
    std::vector<double> z(static_cast<std::size_t>(K));
    for (double& v : z) v = r.normal() * 2.0;
    std::optional<ProbVector> p;
    if (kind != LossKind::Ent) p = random_simplex(r, K);
    const double w = 0.5 + r.uniform();
    auto f = [&](const std::vector<double>& zz) { return loss_grad_logits(kind, p, zz, w).value; };
    auto analytic = loss_grad_logits(kind, p, z, w).grad_logits;
    auto numeric = fd_grad(f, z, 1e-5);
    ASSERT_LT(max_rel_err(analytic, numeric), 1e-4) << to_string(kind) << " K=" << K << " case " << i;
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, GradCheck,
                         ::testing::Combine(::testing::Values(LossKind::Ent, LossKind::CE, LossKind::SCE,
                                                              LossKind::SLR, LossKind::RMT),
                                            ::testing::Values(2, 5, 10)));

TEST(RmtGrad, TwoBranchesMatchCentralDifferences) {
  RngStream r(7, 0);
  for (int K : {2, 5, 10}) {
    for (int i = 0; i < 100; ++i) {
      std::vector<double> zc(static_cast<std::size_t>(K)), za(static_cast<std::size_t>(K));
      for (double& v : zc) v = r.normal() * 2.0;
      for (double& v : za) v = r.normal() * 2.0;
      auto p = random_simplex(r, K);
      auto e = rmt_loss_grad(p, zc, za);
      auto nc = fd_grad([&](const std::vector<double>& z) { return rmt_loss_grad(p, z, za).value; }, zc, 1e-5);
      auto na = fd_grad([&](const std::vector<double>& z) { return rmt_loss_grad(p, zc, z).value; }, za, 1e-5);
      ASSERT_LT(max_rel_err(e.grad_clean, nc), 1e-4);
      ASSERT_LT(max_rel_err(e.grad_aug, na), 1e-4);
    }
  }
}

TEST(LossKindNames, RoundTrip) {
  for (LossKind k : {LossKind::Ent, LossKind::CE, LossKind::SCE, LossKind::SLR, LossKind::RMT})
    EXPECT_EQ(parse_loss_kind(to_string(k)), k);
  EXPECT_EQ(parse_loss_kind("RMT"), LossKind::RMT);
  EXPECT_THROW(parse_loss_kind("mse"), InvalidInput);
}
