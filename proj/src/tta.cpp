#include "ripbench/tta.hpp"

#include <cctype>
#include <cmath>

#include "ripbench/kernels.hpp"

namespace ripbench {
namespace {

std::string lower(const std::string& s) {
  std::string l;
  for (char c : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return l;
}

void require_same_shape(const ModelParams& a, const ModelParams& b, const char* what) {
  if (!a.same_shape(b) || a.W.size() != b.W.size() || a.b.size() != b.b.size())
    throw InvalidInput(std::string(what) + ": parameter shapes differ");
}

ModelParams blend(const ModelParams& base, const ModelParams& student, double alpha, const char* what) {
  require_same_shape(base, student, what);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput(std::string(what) + ": alpha must be in [0, 1]");
  ModelParams out = base;
  const auto& kt = kernels::active();
  kt.axpby(out.W.data(), alpha, base.W.data(), 1.0 - alpha, student.W.data(), out.W.size());
  kt.axpby(out.b.data(), alpha, base.b.data(), 1.0 - alpha, student.b.data(), out.b.size());
  return out;
}

// grad += g (outer) x for a linear-softmax head.
void accumulate(ModelParams& grad, const std::vector<double>& g, const FeatureVector& x, double scale) {
  const auto& kt = kernels::active();
  const auto d = static_cast<std::size_t>(grad.d);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = g[k] * scale;
    double* row = grad.W.data() + k * d;
    kt.add_scaled(row, row, s, x.data(), d);
    grad.b[k] += s;
  }
}

}  // namespace

std::string to_string(Predictor p) { return p == Predictor::Teacher ? "teacher" : "student"; }

std::string to_string(UpdateScheme s) { return s == UpdateScheme::MeanTeacher ? "mean-teacher" : "source-ensemble"; }

Predictor parse_predictor(const std::string& s) {
  const auto l = lower(s);
  if (l == "teacher") return Predictor::Teacher;
  if (l == "student") return Predictor::Student;
  throw InvalidInput("unknown predictor: " + s);
}

UpdateScheme parse_update_scheme(const std::string& s) {
  const auto l = lower(s);
  if (l == "mean-teacher" || l == "meanteacher" || l == "ema") return UpdateScheme::MeanTeacher;
  if (l == "source-ensemble" || l == "sourceensemble") return UpdateScheme::SourceEnsemble;
  throw InvalidInput("unknown update scheme: " + s);
}

void TtaConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("TtaConfig: alpha must be in [0, 1]");
  if (!(lambda >= 0.0)) throw InvalidInput("TtaConfig: lambda must be non-negative");
  if (!(lr >= 0.0)) throw InvalidInput("TtaConfig: lr must be non-negative");
  if (aug.sigma < 0.0) throw InvalidInput("TtaConfig: negative augmentation sigma");
  if (!(slr_weight >= 0.0)) throw InvalidInput("TtaConfig: SLR weight must be non-negative");
  if (src_replay) {
    if (src_replay->m < 0) throw InvalidInput("TtaConfig: replay size must be non-negative");
    if (src_replay->pool.samples.empty()) throw InvalidInput("TtaConfig: replay pool is empty");
  }
}

OptimizerState OptimizerState::zeros_like(const ModelParams& p) {
  OptimizerState s;
  s.mW.assign(p.W.size(), 0.0);
  s.vW.assign(p.W.size(), 0.0);
  s.mb.assign(p.b.size(), 0.0);
  s.vb.assign(p.b.size(), 0.0);
  return s;
}

AdaptState AdaptState::init(const ModelParams& source) {
  AdaptState s;
  s.student = source;
  s.teacher = source;
  s.source = source;
  s.opt = OptimizerState::zeros_like(source);
  return s;
}

ProbVector predict(const AdaptState& state, const FeatureVector& x) { return state.teacher.probs(x); }

ClassLabel predict_label(const AdaptState& state, const FeatureVector& x) { return argmax_label(predict(state, x)); }

std::vector<ProbVector> pseudo_labels(const AdaptState& state, const std::vector<FeatureVector>& batch,
                                      Predictor predictor) {
  const ModelParams& m = predictor == Predictor::Teacher ? state.teacher : state.student;
  std::vector<ProbVector> out;
  out.reserve(batch.size());
  for (const auto& x : batch) out.push_back(one_hot(m.predict(x), m.K));
  return out;
}

ModelParams ema_update(const ModelParams& teacher, const ModelParams& student, double alpha) {
  return blend(teacher, student, alpha, "ema_update");
}

ModelParams source_ensemble_update(const ModelParams& source, const ModelParams& student, double alpha) {
  return blend(source, student, alpha, "source_ensemble_update");
}

std::pair<OptimizerState, ModelParams> optimizer_step(const OptimizerState& opt, const ModelParams& params,
                                                      const ModelParams& grads, double lr) {
  require_same_shape(params, grads, "optimizer_step");
  if (opt.mW.size() != params.W.size() || opt.mb.size() != params.b.size())
    throw InvalidInput("optimizer_step: optimizer state does not match parameters");
  OptimizerState o = opt;
  ModelParams p = params;
  o.t += 1;
  const kernels::AdamCoef c{lr,
                            kAdamBeta1,
                            kAdamBeta2,
                            1.0 - std::pow(kAdamBeta1, static_cast<double>(o.t)),
                            1.0 - std::pow(kAdamBeta2, static_cast<double>(o.t)),
                            kAdamEps};
  const auto& kt = kernels::active();
  kt.adam(p.W.data(), o.mW.data(), o.vW.data(), grads.W.data(), p.W.size(), c);
  kt.adam(p.b.data(), o.mb.data(), o.vb.data(), grads.b.data(), p.b.size(), c);
  return {std::move(o), std::move(p)};
}

std::pair<AdaptState, std::vector<ClassLabel>> adapt_step(const AdaptState& state,
                                                          const std::vector<FeatureVector>& batch,
                                                          const TtaConfig& cfg, RngStream& rng) {
  if (batch.empty()) throw InvalidInput("adapt_step: empty batch");
  const int K = state.teacher.K;

  std::vector<ClassLabel> yhat;
  yhat.reserve(batch.size());
  for (const auto& x : batch) yhat.push_back(predict_label(state, x));

  const ModelParams& labeler = cfg.predictor == Predictor::Teacher ? state.teacher : state.student;
  const bool needs_target = cfg.loss != LossKind::Ent;

  ModelParams grad = ModelParams::zeros(K, state.student.d);
  double loss = 0.0;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (const auto& x : batch) {
    const FeatureVector xt = awgn(x, cfg.aug, rng);
    std::optional<ProbVector> p;
    double w = cfg.slr_weight;
    if (needs_target) {
      ProbVector soft = labeler.probs(x);
      p = one_hot(argmax_label(soft), K);
      if (cfg.loss == LossKind::SLR && cfg.slr_weight_fn) w = cfg.slr_weight_fn(soft);
    }
    if (cfg.loss == LossKind::RMT) {
      RmtEval e = rmt_loss_grad(*p, state.student.logits(x), state.student.logits(xt));
      loss += e.value * inv_b;
      accumulate(grad, e.grad_clean, x, inv_b);
      accumulate(grad, e.grad_aug, xt, inv_b);
    } else {
      LossEval e = loss_grad_logits(cfg.loss, p, state.student.logits(xt), w);
      loss += e.value * inv_b;
      accumulate(grad, e.grad_logits, xt, inv_b);
    }
  }

  if (cfg.lambda > 0.0) {
    for (std::size_t i = 0; i < grad.W.size(); ++i) {
      const double dv = state.student.W[i] - state.source.W[i];
      loss += cfg.lambda * dv * dv;
      grad.W[i] += 2.0 * cfg.lambda * dv;
    }
    for (std::size_t i = 0; i < grad.b.size(); ++i) {
      const double dv = state.student.b[i] - state.source.b[i];
      loss += cfg.lambda * dv * dv;
      grad.b[i] += 2.0 * cfg.lambda * dv;
    }
  }

  if (cfg.src_replay) {
    const auto& pool = cfg.src_replay->pool.samples;
    const int m = cfg.src_replay->m > 0 ? cfg.src_replay->m : std::max<int>(1, static_cast<int>(batch.size()) / 2);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (int i = 0; i < m; ++i) {
      const auto& s = pool[rng.below(pool.size())];
      LossEval e = loss_grad_logits(LossKind::CE, one_hot(s.label, K), state.student.logits(s.features));
      loss += e.value * inv_m;
      accumulate(grad, e.grad_logits, s.features, inv_m);
    }
  }

  AdaptState next = state;
  auto [opt, student] = optimizer_step(state.opt, state.student, grad, cfg.lr);
  next.opt = std::move(opt);
  next.student = std::move(student);
  next.teacher = cfg.update_scheme == UpdateScheme::MeanTeacher
                     ? ema_update(state.teacher, next.student, cfg.alpha)
                     : source_ensemble_update(state.source, next.student, cfg.alpha);
  next.t = state.t + 1;
  next.last_loss = loss;
  return {std::move(next), std::move(yhat)};
}

TtaEngine::TtaEngine(const ModelParams& source, TtaConfig cfg, RngStream rng)
    : cfg_(std::move(cfg)), rng0_(rng), rng_(rng), state_(AdaptState::init(source)) {
  cfg_.validate();
}

std::vector<ClassLabel> TtaEngine::submit(const std::vector<FeatureVector>& batch) {
  auto [next, labels] = adapt_step(state_, batch, cfg_, rng_);
  state_ = std::move(next);
  return labels;
}

std::vector<ClassLabel> TtaEngine::evaluate(const std::vector<FeatureVector>& batch) const {
  std::vector<ClassLabel> out;
  out.reserve(batch.size());
  for (const auto& x : batch) out.push_back(predict_label(state_, x));
  return out;
}

void TtaEngine::reset(std::optional<RngStream> rng) {
  state_ = AdaptState::init(state_.source);
  if (rng) rng0_ = *rng;
  rng_ = rng0_;
}

}  // namespace ripbench
