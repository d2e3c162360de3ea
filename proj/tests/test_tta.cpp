#include <gtest/gtest.h>

#include <cmath>

#include "ripbench/tta.hpp"

using namespace ripbench;

namespace {

ModelParams random_params(int K, int d, RngStream& r, double scale = 1.0) {
  ModelParams m = ModelParams::zeros(K, d);
  for (auto& w : m.W) w = r.normal() * scale;
  for (auto& b : m.b) b = r.normal() * scale;
  return m;
}

std::vector<FeatureVector> random_batch(int n, int d, RngStream& r) {
  std::vector<FeatureVector> out(n, FeatureVector(d));
  for (auto& x : out)
    for (auto& v : x) v = r.normal();
  return out;
}

double param_dist2(const ModelParams& a, const ModelParams& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.W.size(); ++i) s += (a.W[i] - b.W[i]) * (a.W[i] - b.W[i]);
  for (std::size_t i = 0; i < a.b.size(); ++i) s += (a.b[i] - b.b[i]) * (a.b[i] - b.b[i]);
  return s;
}

}  // namespace

TEST(TtaPredict, ZeroParamsGiveUniform) {
  AdaptState s = AdaptState::init(ModelParams::zeros(4, 3));
  ProbVector p = predict(s, {1.0, -2.0, 0.5});
  for (double v : p) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(TtaPredict, DeploysTeacher) {
  RngStream r(1, 0);
  AdaptState s = AdaptState::init(random_params(3, 2, r));
  s.student = random_params(3, 2, r);
  FeatureVector x{0.3, -0.7};
  EXPECT_EQ(predict(s, x), s.teacher.probs(x));
}

TEST(TtaPseudoLabels, HardOneHotFromChosenModel) {
  RngStream r(2, 0);
  AdaptState s = AdaptState::init(random_params(5, 4, r));
  s.student = random_params(5, 4, r);
  auto batch = random_batch(30, 4, r);
  auto pt = pseudo_labels(s, batch, Predictor::Teacher);
  auto ps = pseudo_labels(s, batch, Predictor::Student);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_EQ(pt[i], one_hot(s.teacher.predict(batch[i]), 5));
    EXPECT_EQ(ps[i], one_hot(s.student.predict(batch[i]), 5));
  }
}

TEST(TtaEma, Examples) {
  ModelParams t = ModelParams::zeros(2, 1), st = ModelParams::zeros(2, 1);
  t.W = {1.0, 2.0};
  t.b = {0.0, 4.0};
  st.W = {3.0, 0.0};
  st.b = {2.0, 0.0};
  ModelParams e = ema_update(t, st, 0.5);
  EXPECT_EQ(e.W, (std::vector<double>{2.0, 1.0}));
  EXPECT_EQ(e.b, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(ema_update(t, st, 1.0), t);
  EXPECT_EQ(ema_update(t, st, 0.0), st);
  EXPECT_THROW(ema_update(t, ModelParams::zeros(3, 1), 0.5), InvalidInput);
  EXPECT_THROW(ema_update(t, st, 1.5), InvalidInput);
  EXPECT_THROW(source_ensemble_update(t, ModelParams::zeros(2, 2), 0.5), InvalidInput);
}

TEST(TtaSourceEnsemble, StaysWithinStudentDistanceOfSource) {
  RngStream r(3, 0);
  for (int i = 0; i < 200; ++i) {
    ModelParams src = random_params(4, 3, r), st = random_params(4, 3, r);
    const double a = r.uniform();
    ModelParams out = source_ensemble_update(src, st, a);
    EXPECT_NEAR(std::sqrt(param_dist2(out, src)), (1.0 - a) * std::sqrt(param_dist2(st, src)), 1e-9);
  }
}

TEST(TtaAdam, FirstStepIsSignedLearningRate) {
  ModelParams p = ModelParams::zeros(2, 1);
  p.W = {1.0, -1.0};
  p.b = {0.5, 0.0};
  ModelParams g = ModelParams::zeros(2, 1);
  g.W = {0.2, -3.0};
  g.b = {1e-3, 0.0};
  auto [o, q] = optimizer_step(OptimizerState::zeros_like(p), p, g, 0.01);
  EXPECT_EQ(o.t, 1);
  EXPECT_NEAR(q.W[0], 1.0 - 0.01 * 0.2 / (0.2 + kAdamEps), 1e-15);
  EXPECT_NEAR(q.W[1], -1.0 + 0.01 * 3.0 / (3.0 + kAdamEps), 1e-15);
  EXPECT_NEAR(q.b[0], 0.5 - 0.01 * 1e-3 / (1e-3 + kAdamEps), 1e-15);
  EXPECT_EQ(q.b[1], 0.0);
  EXPECT_NEAR(o.mW[0], 0.1 * 0.2, 1e-15);
  EXPECT_NEAR(o.vW[1], 0.001 * 9.0, 1e-15);
}

TEST(TtaAdam, SecondStepMatchesHandRecurrence) {
  ModelParams p = ModelParams::zeros(1, 1);
  p.W = {0.0};
  ModelParams g1 = ModelParams::zeros(1, 1), g2 = ModelParams::zeros(1, 1);
  g1.W = {1.0};
  g2.W = {-2.0};
  auto [o1, p1] = optimizer_step(OptimizerState::zeros_like(p), p, g1, 0.1);
  auto [o2, p2] = optimizer_step(o1, p1, g2, 0.1);
  const double m = 0.9 * 0.1 * 1.0 + 0.1 * -2.0;
  const double v = 0.999 * 0.001 * 1.0 + 0.001 * 4.0;
  const double mh = m / (1.0 - 0.81), vh = v / (1.0 - 0.999 * 0.999);
  EXPECT_NEAR(p2.W[0], p1.W[0] - 0.1 * mh / (std::sqrt(vh) + kAdamEps), 1e-14);
  EXPECT_THROW(optimizer_step(OptimizerState{}, p, g1, 0.1), InvalidInput);
}

TEST(TtaAdaptStep, CeSingleStepMatchesHandOracle) {
  RngStream r(4, 0);
  const int K = 3, d = 2;
  AdaptState s = AdaptState::init(random_params(K, d, r));
  auto batch = random_batch(8, d, r);
  TtaConfig cfg;
  cfg.aug = aug_off();
  cfg.lr = 0.05;
  cfg.alpha = 0.7;

  // Independent gradient: mean over the batch of (softmax(z) - onehot(teacher argmax)) x^T.
  std::vector<double> gW(K * d, 0.0), gb(K, 0.0);
  for (const auto& x : batch) {
    std::vector<double> z(K);
    for (int k = 0; k < K; ++k) {
      z[k] = s.student.b[k];
      for (int j = 0; j < d; ++j) z[k] += s.student.W[k * d + j] * x[j];
    }
    int best = 0;
    for (int k = 1; k < K; ++k)
      if (z[k] > z[best]) best = k;
    double mx = z[best], den = 0.0;
    for (double v : z) den += std::exp(v - mx);
    for (int k = 0; k < K; ++k) {
      const double e = std::exp(z[k] - mx) / den - (k == best ? 1.0 : 0.0);
      gb[k] += e / batch.size();
      for (int j = 0; j < d; ++j) gW[k * d + j] += e * x[j] / batch.size();
    }
  }
  auto [next, labels] = adapt_step(s, batch, cfg, r);
  for (int i = 0; i < K * d; ++i) {
    const double want = s.student.W[i] - 0.05 * gW[i] / (std::abs(gW[i]) + kAdamEps);
    EXPECT_NEAR(next.student.W[i], want, 1e-12);
    EXPECT_NEAR(next.teacher.W[i], 0.7 * s.teacher.W[i] + 0.3 * want, 1e-12);
  }
  for (int k = 0; k < K; ++k) EXPECT_NEAR(next.student.b[k], s.student.b[k] - 0.05 * gb[k] / (std::abs(gb[k]) + kAdamEps), 1e-12);
  for (std::size_t i = 0; i < batch.size(); ++i) EXPECT_EQ(labels[i], s.teacher.predict(batch[i]));
  EXPECT_EQ(next.t, 1);
}

TEST(TtaAdaptStep, ReturnsPreUpdatePredictions) {
  RngStream r(5, 0);
  AdaptState s = AdaptState::init(random_params(4, 3, r));
  TtaConfig cfg;
  cfg.lr = 0.5;
  cfg.alpha = 0.0;
  for (int t = 0; t < 20; ++t) {
    auto batch = random_batch(16, 3, r);
    const AdaptState snapshot = s;
    auto [next, labels] = adapt_step(s, batch, cfg, r);
    for (std::size_t i = 0; i < batch.size(); ++i) ASSERT_EQ(labels[i], snapshot.teacher.predict(batch[i]));
    s = next;
  }
}

TEST(TtaAdaptStep, AlphaZeroTeacherIsStudent) {
  RngStream r(6, 0);
  AdaptState s = AdaptState::init(random_params(3, 3, r));
  TtaConfig cfg;
  cfg.alpha = 0.0;
  cfg.lr = 0.1;
  auto [next, _] = adapt_step(s, random_batch(10, 3, r), cfg, r);
  EXPECT_EQ(next.teacher, next.student);
}

TEST(TtaAdaptStep, AlphaOneFreezesTeacher) {
  RngStream r(7, 0);
  AdaptState s = AdaptState::init(random_params(3, 3, r));
  TtaConfig cfg;
  cfg.alpha = 1.0;
  cfg.lr = 0.1;
  for (int t = 0; t < 10; ++t) s = adapt_step(s, random_batch(10, 3, r), cfg, r).first;
  EXPECT_EQ(s.teacher, s.source);
  EXPECT_NE(s.student, s.source);
}

TEST(TtaAdaptStep, ZeroLearningRateLeavesParameters) {
  RngStream r(8, 0);
  AdaptState s = AdaptState::init(random_params(3, 3, r));
  TtaConfig cfg;
  cfg.lr = 0.0;
  for (LossKind k : {LossKind::Ent, LossKind::CE, LossKind::SCE, LossKind::SLR, LossKind::RMT}) {
    cfg.loss = k;
    auto [next, _] = adapt_step(s, random_batch(10, 3, r), cfg, r);
    EXPECT_EQ(next.student, s.student) << to_string(k);
    EXPECT_EQ(next.teacher, s.teacher) << to_string(k);
  }
}

TEST(TtaAdaptStep, EntWithoutAugLogsCleanEntropy) {
  RngStream r(9, 0);
  AdaptState s = AdaptState::init(random_params(4, 2, r));
  auto batch = random_batch(12, 2, r);
  TtaConfig cfg;
  cfg.loss = LossKind::Ent;
  cfg.aug = aug_off();
  double want = 0.0;
  for (const auto& x : batch) want += ent_loss(s.student.probs(x)) / batch.size();
  auto [next, _] = adapt_step(s, batch, cfg, r);
  EXPECT_NEAR(next.last_loss, want, 1e-12);
}

TEST(TtaAdaptStep, RegularizerPullsTowardSource) {
  RngStream r(10, 0);
  AdaptState s = AdaptState::init(random_params(3, 2, r));
  s.student = random_params(3, 2, r, 3.0);
  TtaConfig cfg;
  cfg.lambda = 1e4;  // dominates the data term
  cfg.lr = 1e-3;
  const double before = param_dist2(s.student, s.source);
  auto [next, _] = adapt_step(s, random_batch(4, 2, r), cfg, r);
  EXPECT_LT(param_dist2(next.student, s.source), before);
}

TEST(TtaAdaptStep, ReplayPathIsDeterministicAndAddsCe) {
  RngStream r(11, 0);
  AdaptState s = AdaptState::init(random_params(3, 2, r));
  TtaConfig cfg;
  cfg.lr = 0.0;
  cfg.aug = aug_off();
  auto batch = random_batch(8, 2, r);
  RngStream a(12, 0), b(12, 0);
  const double plain = adapt_step(s, batch, cfg, a).first.last_loss;
  SrcReplay rep;
  rep.pool.num_classes = 3;
  for (int i = 0; i < 5; ++i) rep.pool.samples.push_back({random_batch(1, 2, r)[0], i % 3});
  cfg.src_replay = rep;
  const double with = adapt_step(s, batch, cfg, b).first.last_loss;
  EXPECT_GT(with, plain);
  RngStream c(12, 0);
  EXPECT_EQ(adapt_step(s, batch, cfg, c).first.last_loss, with);
}

TEST(TtaAdaptStep, EmptyBatchThrows) {
  RngStream r(13, 0);
  AdaptState s = AdaptState::init(random_params(3, 2, r));
  EXPECT_THROW(adapt_step(s, {}, TtaConfig{}, r), InvalidInput);
}

TEST(TtaEngine, DeterministicAndResettable) {
  RngStream r(14, 0);
  ModelParams src = random_params(4, 3, r);
  auto b1 = random_batch(32, 3, r), b2 = random_batch(32, 3, r);
  TtaConfig cfg;
  cfg.lr = 0.05;
  TtaEngine e1(src, cfg, RngStream(15, 0)), e2(src, cfg, RngStream(15, 0));
  auto l1 = e1.submit(b1);
  EXPECT_EQ(l1, e2.submit(b1));
  EXPECT_EQ(e1.submit(b2), e2.submit(b2));
  EXPECT_EQ(e1.state(), e2.state());
  e1.reset();
  EXPECT_EQ(e1.state(), AdaptState::init(src));
  EXPECT_EQ(e1.submit(b1), l1);
  EXPECT_EQ(e1.evaluate(b2), e2.evaluate(b2));
}

TEST(TtaConfig, Validation) {
  TtaConfig cfg;
  cfg.alpha = -0.1;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = TtaConfig{};
  cfg.src_replay = SrcReplay{};
  EXPECT_THROW(cfg.validate(), InvalidInput);
  EXPECT_EQ(parse_predictor("student"), Predictor::Student);
  EXPECT_EQ(parse_update_scheme(to_string(UpdateScheme::SourceEnsemble)), UpdateScheme::SourceEnsemble);
  EXPECT_THROW(parse_predictor("oracle"), InvalidInput);
}
