#include "ripbench/attack.hpp"

#include <algorithm>
#include <exception>
#include <ostream>
#include <string>

namespace ripbench {
namespace {

std::vector<FeatureVector> features_of(const std::vector<LabeledSample>& s) {
  std::vector<FeatureVector> out;
  out.reserve(s.size());
  for (const auto& x : s) out.push_back(x.features);
  return out;
}

std::vector<ClassLabel> submit_checked(VictimHandle& victim, const std::vector<FeatureVector>& batch) {
  std::vector<ClassLabel> labels;
  try {
    labels = victim.submit(batch);
  } catch (const TransportError&) {
    throw;
  } catch (const std::exception& e) {
    throw TransportError(std::string("victim query failed: ") + e.what());
  }
  if (labels.size() != batch.size()) throw TransportError("victim returned the wrong number of labels");
  return labels;
}

void refill(std::vector<LabeledSample>& S, std::size_t B, const LabeledDataset& D_a, RngStream& rng) {
  while (S.size() < B) S.push_back(D_a.samples[rng.below(D_a.samples.size())]);
}

Checkpoint evaluate(VictimSession& session, const AttackConfig& cfg, const LabeledDataset& probe, int trial, int step,
                    ClassLabel y_a) {
  std::vector<FeatureVector> xs;
  std::vector<ClassLabel> truths;
  xs.reserve(probe.size());
  for (const auto& s : probe.samples) {
    xs.push_back(s.features);
    truths.push_back(s.label);
  }
  std::vector<ClassLabel> preds;
  if (cfg.oracle_eval) {
    if (!session.oracle) throw InvalidInput("run_attack: oracle_eval requested but the session has no oracle");
    preds = session.oracle(xs);
  } else {
    // In-band: the probe goes through the query interface in B-sized chunks and the victim adapts on it.
    for (std::size_t i = 0; i < xs.size(); i += static_cast<std::size_t>(cfg.B)) {
      const std::size_t end = std::min(xs.size(), i + static_cast<std::size_t>(cfg.B));
      std::vector<FeatureVector> chunk(xs.begin() + static_cast<std::ptrdiff_t>(i),
                                       xs.begin() + static_cast<std::ptrdiff_t>(end));
      auto got = submit_checked(*session.victim, chunk);
      preds.insert(preds.end(), got.begin(), got.end());
    }
  }
  auto err = classwise_error(preds, truths, probe.num_classes);
  Checkpoint c;
  c.trial = trial;
  c.step = step;
  c.per_class_error = err.per_class;
  c.avg_error = err.avg;
  c.marginal = prediction_marginal(preds, probe.num_classes);
  c.victim = y_a;
  return c;
}

template <typename Round>
RunRecord run_trials(const VictimFactory& factory, const AttackConfig& cfg, const LabeledDataset& probe, RngStream rng,
                     Round round) {
  cfg.validate();
  if (probe.samples.empty()) throw InvalidInput("run_attack: empty probe set");
  RunRecord rec;
  rec.seed = rng.seed();
  RngStream pick_rng = rng.split(stream_id("attack/victim-classes"));
  std::vector<ClassLabel> classes =
      cfg.y_a ? std::vector<ClassLabel>(static_cast<std::size_t>(cfg.trials), *cfg.y_a)
              : pick_victim_classes(cfg.D_a.num_classes, cfg.trials, pick_rng);
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const ClassLabel y_a = classes[static_cast<std::size_t>(trial)];
    RngStream trial_rng = rng.split(static_cast<std::uint64_t>(trial));
    VictimSession session = factory(trial);
    if (!session.victim) throw InvalidInput("run_attack: factory returned no victim");
    rec.checkpoints.push_back(evaluate(session, cfg, probe, trial, 0, y_a));
    AttackState st = initial_attack_state(y_a, cfg, trial_rng);
    for (int t = 1; t <= cfg.T_a; ++t) {
      st = round(st, *session.victim, trial_rng);
      if (t % cfg.eval_every == 0 || t == cfg.T_a) rec.checkpoints.push_back(evaluate(session, cfg, probe, trial, t, y_a));
    }
  }
  return rec;
}

}  // namespace

void AttackConfig::validate() const {
  if (T_a < 0) throw InvalidInput("AttackConfig: T_a must be non-negative");
  if (B < 1) throw InvalidInput("AttackConfig: B must be at least 1");
  if (trials < 1) throw InvalidInput("AttackConfig: trials must be at least 1");
  if (eval_every < 1) throw InvalidInput("AttackConfig: eval_every must be at least 1");
  if (D_a.samples.empty()) throw InvalidInput("AttackConfig: D_a is empty");
  if (y_a && (*y_a < 0 || *y_a >= D_a.num_classes)) throw InvalidInput("AttackConfig: victim class out of range");
}

std::vector<LabeledSample> ips_filter(const std::vector<LabeledSample>& samples, const std::vector<ClassLabel>& preds,
                                      ClassLabel y_a) {
  if (samples.size() != preds.size()) throw InvalidInput("ips_filter: samples and predictions differ in length");
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].label == y_a && preds[i] != samples[i].label) out.push_back(samples[i]);
  return out;
}

AttackState initial_attack_state(ClassLabel y_a, const AttackConfig& cfg, RngStream& rng) {
  AttackState st;
  st.y_a = y_a;
  refill(st.S, static_cast<std::size_t>(cfg.B), cfg.D_a, rng);
  return st;
}

AttackState rip_round(const AttackState& state, VictimHandle& victim, const AttackConfig& cfg, RngStream& rng) {
  if (state.S.size() != static_cast<std::size_t>(cfg.B)) throw InvalidInput("rip_round: |S| must equal B");
  const auto labels = submit_checked(victim, features_of(state.S));
  AttackState next;
  next.y_a = state.y_a;
  next.I = ips_filter(state.S, labels, state.y_a);
  next.S = next.I;
  refill(next.S, static_cast<std::size_t>(cfg.B), cfg.D_a, rng);
  next.t = state.t + 1;
  return next;
}

std::vector<ClassLabel> pick_victim_classes(int K, int trials, RngStream& rng) {
  if (K < 1) throw InvalidInput("pick_victim_classes: K must be positive");
  std::vector<ClassLabel> out;
  while (static_cast<int>(out.size()) < trials) {
    std::vector<ClassLabel> perm(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) perm[static_cast<std::size_t>(k)] = k;
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    for (ClassLabel c : perm)
      if (static_cast<int>(out.size()) < trials) out.push_back(c);
  }
  return out;
}

RngStream attacker_stream(std::uint64_t seed) { return RngStream(seed, stream_id("attacker")); }

RunRecord run_attack(const VictimFactory& factory, const AttackConfig& cfg, const LabeledDataset& probe,
                     RngStream rng) {
  return run_trials(factory, cfg, probe, rng, [&](const AttackState& st, VictimHandle& v, RngStream& r) {
    return rip_round(st, v, cfg, r);
  });
}

RunRecord run_clean_stream(const VictimFactory& factory, const AttackConfig& cfg, const LabeledDataset& probe,
                           RngStream rng) {
  return run_trials(factory, cfg, probe, rng, [&](const AttackState& st, VictimHandle& v, RngStream& r) {
    submit_checked(v, features_of(st.S));
    AttackState next;
    next.y_a = st.y_a;
    refill(next.S, static_cast<std::size_t>(cfg.B), cfg.D_a, r);
    next.t = st.t + 1;
    return next;
  });
}

std::vector<ClassLabel> RecordingVictim::submit(const std::vector<FeatureVector>& batch) {
  auto labels = inner_->submit(batch);
  if (log_ != nullptr) {
    for (std::size_t i = 0; i < labels.size(); ++i) *log_ << (i ? "," : "") << labels[i];
    *log_ << '\n';
  }
  return labels;
}

}  // namespace ripbench
