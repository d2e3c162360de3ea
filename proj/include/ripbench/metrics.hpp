#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "ripbench/core.hpp"

namespace ripbench {

struct ClasswiseError {
  std::vector<double> per_class;  // 0 for classes with no samples
  std::vector<bool> present;
  double avg = 0.0;  // unweighted mean over present classes
};

ClasswiseError classwise_error(const std::vector<ClassLabel>& preds, const std::vector<ClassLabel>& truths, int K);

// Fraction of predictions landing on each class.
ProbVector prediction_marginal(const std::vector<ClassLabel>& preds, int K);

// True iff the marginal mass on `subset` is below epsilon at each of the last `window` checkpoints.
bool collapse_detect(const std::vector<ProbVector>& marginals, const std::set<ClassLabel>& subset,
                     double epsilon = 0.01, std::size_t window = 3);

struct Checkpoint {
  int trial = 0;
  int step = 0;
  std::vector<double> per_class_error;
  double avg_error = 0.0;
  ProbVector marginal;
  ClassLabel victim = -1;
  double boundary = std::numeric_limits<double>::quiet_NaN();  // GMMC only

  double victim_marginal() const;
};

struct RunRecord {
  std::vector<Checkpoint> checkpoints;
  std::string config_digest;
  std::uint64_t seed = 0;

  std::vector<Checkpoint> trial(int t) const;
  std::vector<int> trials() const;
  // Checkpoints at the last step of each trial.
  std::vector<Checkpoint> finals() const;
  double mean_final_error() const;
  // Mean of avg_error over every checkpoint of every trial.
  double mean_error() const;
  void append(const RunRecord& other);
};

// 16 hex digits of FNV-1a over the canonical config text.
std::string digest_hex(const std::string& text);

void write_metadata_line(std::ostream& os, const RunRecord& r);
// trial,step,avg_classwise_error,victim_class_marginal
void write_attack_csv(std::ostream& os, const RunRecord& r);
// step,marginal_class0,marginal_class1,boundary_location
void write_gmmc_csv(std::ostream& os, const RunRecord& r);

}  // namespace ripbench
