#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ripbench/core.hpp"

namespace ripbench {

struct DomainSpec {
  int K = 0;
  int d = 0;
  std::vector<FeatureVector> class_means;
  double noise_scale = 1.0;
  FeatureVector shift;  // added to every mean; zero for the source domain

  void validate() const;
  DomainSpec with_shift(FeatureVector s) const;
  DomainSpec unshifted() const;
};

// Means ~ N(0, I) * spread / sqrt(2), so the expected distance between two means is about `spread`.
// The shift is a random direction scaled to `shift_norm`.
DomainSpec random_domain(int K, int d, double spread, double noise_scale, double shift_norm, RngStream rng);

LabeledDataset gen_blobs(const DomainSpec& dom, std::size_t n, RngStream& rng);

// Linear softmax classifier; W is row-major K x d.
struct ModelParams {
  int K = 0;
  int d = 0;
  std::vector<double> W;
  std::vector<double> b;

  static ModelParams zeros(int K, int d);
  std::vector<double> logits(const FeatureVector& x) const;
  ProbVector probs(const FeatureVector& x) const;
  ClassLabel predict(const FeatureVector& x) const;
  bool same_shape(const ModelParams& o) const { return K == o.K && d == o.d; }
  bool operator==(const ModelParams&) const = default;
};

// Flat CSV: header "K,d" line then one line of K*d + K values (W row-major, then b).
void write_params_csv(std::ostream& os, const ModelParams& m);
ModelParams read_params_csv(std::istream& is);

struct TrainConfig {
  double lr = 0.1;
  int max_iters = 2000;
  double target_accuracy = 0.99;
};

double accuracy(const ModelParams& m, const LabeledDataset& ds);

// Full-batch gradient descent on mean cross-entropy from zero init.
ModelParams train_source(const LabeledDataset& ds, const TrainConfig& cfg = {});

}  // namespace ripbench
