#include "ripbench/gmmc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ripbench {
namespace {

double log_joint(const GmmcParams& p, int k, double x) {
  const auto i = static_cast<std::size_t>(k);
  const double var = p.variances[i];
  const double dx = x - p.means[i];
  return std::log(clamp_prob(p.priors[i])) - 0.5 * std::log(2.0 * std::numbers::pi * var) - dx * dx / (2.0 * var);
}

struct LabeledPoint {
  double x;
  ClassLabel y;
};

LabeledPoint draw_point(const GmmcParams& truth, RngStream& rng) {
  ClassLabel y = rng.uniform() < truth.priors[0] ? 0 : 1;
  const auto i = static_cast<std::size_t>(y);
  return {truth.means[i] + std::sqrt(truth.variances[i]) * rng.normal(), y};
}

}  // namespace

void GmmcParams::validate() const {
  for (int k = 0; k < 2; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (!(priors[i] >= 0.0 && priors[i] <= 1.0)) throw InvalidInput("GmmcParams: prior outside [0, 1]");
    if (!(variances[i] > 0.0)) throw InvalidInput("GmmcParams: variance must be positive");
    if (!std::isfinite(means[i])) throw InvalidInput("GmmcParams: non-finite mean");
  }
  if (std::abs(priors[0] + priors[1] - 1.0) > 1e-9) throw InvalidInput("GmmcParams: priors must sum to 1");
}

void GmmcSimConfig::validate() const {
  truth.validate();
  if (n_pool < 1 || steps < 0 || batch < 1 || eval_every < 1) throw InvalidInput("GmmcSimConfig: bad counts");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("GmmcSimConfig: alpha must be in [0, 1]");
  if (victim != 0 && victim != 1) throw InvalidInput("GmmcSimConfig: victim must be 0 or 1");
  if (aug.sigma < 0.0) throw InvalidInput("GmmcSimConfig: negative augmentation sigma");
}

ProbVector gmmc_posterior(const GmmcParams& params, double x) {
  const double l0 = log_joint(params, 0, x);
  const double l1 = log_joint(params, 1, x);
  return softmax({l0, l1});
}

ClassLabel gmmc_predict(const GmmcParams& params, double x) { return argmax_label(gmmc_posterior(params, x)); }

double gmmc_boundary(const GmmcParams& p) {
  // log_joint(0, x) - log_joint(1, x) = a x^2 + b x + c
  const double v0 = p.variances[0], v1 = p.variances[1];
  const double m0 = p.means[0], m1 = p.means[1];
  const double a = -0.5 / v0 + 0.5 / v1;
  const double b = m0 / v0 - m1 / v1;
  const double c = std::log(clamp_prob(p.priors[0])) - std::log(clamp_prob(p.priors[1])) - 0.5 * std::log(v0 / v1) -
                   m0 * m0 / (2.0 * v0) + m1 * m1 / (2.0 * v1);
  std::vector<double> roots;
  if (std::abs(a) < 1e-12) {
    if (std::abs(b) > 0.0) roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      roots.push_back((-b + s) / (2.0 * a));
      roots.push_back((-b - s) / (2.0 * a));
    }
  }
  if (roots.empty()) return std::nan("");
  const double lo = std::min(m0, m1), hi = std::max(m0, m1), mid = 0.5 * (m0 + m1);
  for (double r : roots)
    if (r >= lo && r <= hi) return r;
  return *std::min_element(roots.begin(), roots.end(),
                           [&](double x, double y) { return std::abs(x - mid) < std::abs(y - mid); });
}

GmmcParams gmmc_fit_step(const GmmcParams& params, const std::vector<double>& batch, double alpha,
                         const AugConfig& aug, RngStream& rng) {
  if (batch.empty()) throw InvalidInput("gmmc_fit_step: empty batch");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("gmmc_fit_step: alpha must be in [0, 1]");
  std::array<double, 2> n{0, 0}, sum{0, 0}, sumsq{0, 0};
  std::vector<ClassLabel> labels(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) labels[i] = gmmc_predict(params, batch[i]);
  std::vector<double> xt(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) xt[i] = awgn(batch[i], aug, rng);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto k = static_cast<std::size_t>(labels[i]);
    n[k] += 1.0;
    sum[k] += xt[i];
  }
  std::array<double, 2> mean{0, 0};
  for (std::size_t k = 0; k < 2; ++k) mean[k] = n[k] > 0 ? sum[k] / n[k] : 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto k = static_cast<std::size_t>(labels[i]);
    const double dx = xt[i] - mean[k];
    sumsq[k] += dx * dx;
  }
  GmmcParams out = params;
  const double total = static_cast<double>(batch.size());
  for (std::size_t k = 0; k < 2; ++k) {
    out.priors[k] = alpha * params.priors[k] + (1.0 - alpha) * (n[k] / total);
    if (n[k] == 0) continue;
    out.means[k] = alpha * params.means[k] + (1.0 - alpha) * mean[k];
    out.variances[k] = std::max(kGmmcVarFloor, alpha * params.variances[k] + (1.0 - alpha) * (sumsq[k] / n[k]));
  }
  return out;
}

RunRecord gmmc_simulate(const GmmcSimConfig& cfg, RngStream rng) {
  cfg.validate();
  RngStream pool_rng = rng.split(stream_id("gmmc/pool"));
  RngStream draw_rng = rng.split(stream_id("gmmc/draws"));
  RngStream aug_rng = rng.split(stream_id("gmmc/augment"));

  std::vector<LabeledPoint> pool(static_cast<std::size_t>(cfg.n_pool));
  for (auto& p : pool) p = draw_point(cfg.truth, pool_rng);

  GmmcParams params = cfg.truth;
  RunRecord rec;
  rec.seed = rng.seed();
  auto record = [&](int step) {
    std::vector<ClassLabel> preds, truths;
    preds.reserve(pool.size());
    truths.reserve(pool.size());
    for (const auto& p : pool) {
      preds.push_back(gmmc_predict(params, p.x));
      truths.push_back(p.y);
    }
    auto err = classwise_error(preds, truths, 2);
    Checkpoint c;
    c.step = step;
    c.per_class_error = err.per_class;
    c.avg_error = err.avg;
    c.marginal = prediction_marginal(preds, 2);
    c.victim = cfg.victim;
    c.boundary = gmmc_boundary(params);
    rec.checkpoints.push_back(std::move(c));
  };

  std::vector<LabeledPoint> S(static_cast<std::size_t>(cfg.batch));
  for (auto& p : S) p = draw_point(cfg.truth, draw_rng);
  record(0);
  for (int t = 1; t <= cfg.steps; ++t) {
    std::vector<double> xs;
    std::vector<ClassLabel> preds;
    xs.reserve(S.size());
    for (const auto& p : S) {
      xs.push_back(p.x);
      preds.push_back(gmmc_predict(params, p.x));
    }
    params = gmmc_fit_step(params, xs, cfg.alpha, cfg.aug, aug_rng);
    std::vector<LabeledPoint> next;
    if (cfg.ips_enabled)
      for (std::size_t i = 0; i < S.size(); ++i)
        if (S[i].y == cfg.victim && preds[i] != S[i].y) next.push_back(S[i]);
    while (next.size() < static_cast<std::size_t>(cfg.batch)) next.push_back(draw_point(cfg.truth, draw_rng));
    S = std::move(next);
    if (t % cfg.eval_every == 0 || t == cfg.steps) record(t);
  }
  return rec;
}

}  // namespace ripbench
