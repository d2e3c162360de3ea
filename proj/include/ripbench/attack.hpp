#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ripbench/core.hpp"
#include "ripbench/metrics.hpp"

namespace ripbench {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The attacker's only view of the victim: submit a batch, receive one label per row.
class VictimHandle {
 public:
  virtual ~VictimHandle() = default;
  virtual std::vector<ClassLabel> submit(const std::vector<FeatureVector>& batch) = 0;
};

using LabelOracle = std::function<std::vector<ClassLabel>(const std::vector<FeatureVector>&)>;

// A victim reset to its source weights for one trial. `oracle` reads the deployed model without
// adapting it; it belongs to the experimenter and is only consulted when AttackConfig::oracle_eval is set.
struct VictimSession {
  std::unique_ptr<VictimHandle> victim;
  LabelOracle oracle;
};
using VictimFactory = std::function<VictimSession(int trial)>;

struct AttackConfig {
  int T_a = 500;
  int B = 64;
  std::optional<ClassLabel> y_a;  // unset: drawn per trial without replacement
  LabeledDataset D_a;
  int trials = 10;
  int eval_every = 25;
  bool oracle_eval = true;

  void validate() const;
};

struct AttackState {
  ClassLabel y_a = 0;
  std::vector<LabeledSample> S;
  std::vector<LabeledSample> I;
  int t = 0;
};

std::vector<LabeledSample> ips_filter(const std::vector<LabeledSample>& samples, const std::vector<ClassLabel>& preds,
                                      ClassLabel y_a);

AttackState initial_attack_state(ClassLabel y_a, const AttackConfig& cfg, RngStream& rng);

// One round: submit S, keep the mispredicted victim-class rows, refill from D_a with replacement.
// Throws TransportError if the victim fails or answers with the wrong number of labels.
AttackState rip_round(const AttackState& state, VictimHandle& victim, const AttackConfig& cfg, RngStream& rng);

// Victim classes for `trials` trials: fresh permutations of 0..K-1, consumed in order.
std::vector<ClassLabel> pick_victim_classes(int K, int trials, RngStream& rng);

// Attacker-side randomness for a whole run, keyed only by the master seed.
RngStream attacker_stream(std::uint64_t seed);

RunRecord run_attack(const VictimFactory& factory, const AttackConfig& cfg, const LabeledDataset& probe,
                     RngStream rng);

// Baseline with no adversary: every round submits B uniform draws from D_a.
RunRecord run_clean_stream(const VictimFactory& factory, const AttackConfig& cfg, const LabeledDataset& probe,
                           RngStream rng);

// Pass-through that appends one comma-separated line per answered query.
class RecordingVictim : public VictimHandle {
 public:
  RecordingVictim(std::unique_ptr<VictimHandle> inner, std::ostream* log) : inner_(std::move(inner)), log_(log) {}
  std::vector<ClassLabel> submit(const std::vector<FeatureVector>& batch) override;

 private:
  std::unique_ptr<VictimHandle> inner_;
  std::ostream* log_;
};

}  // namespace ripbench
