#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ripbench {

inline constexpr double kProbEps = 1e-12;

using FeatureVector = std::vector<double>;
using ProbVector = std::vector<double>;
using ClassLabel = int;

struct LabeledSample {
  FeatureVector features;
  ClassLabel label = 0;

  bool operator==(const LabeledSample&) const = default;
};

// Plain container; generators live in data.hpp. Kept here so the attack side
// can hold a dataset without linking the data generator or the engine.
struct LabeledDataset {
  std::vector<LabeledSample> samples;
  int num_classes = 0;

  std::size_t size() const { return samples.size(); }
  std::size_t dim() const { return samples.empty() ? 0 : samples.front().features.size(); }
  bool operator==(const LabeledDataset&) const = default;
};

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ProbVector softmax(const std::vector<double>& logits);
ClassLabel argmax_label(const ProbVector& p);
ProbVector one_hot(ClassLabel k, int num_classes);
double clamp_prob(double q);

// Counter-based generator: draw i of stream (seed, id) is a pure function of
// (seed, id, i), so streams never overlap and can be split freely.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

  // Child stream keyed by this stream's identity and `child`; does not advance this stream.
  RngStream split(std::uint64_t child) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x);
// Stable 64-bit id for a stream name, so call sites can say split(stream_id("augment")).
std::uint64_t stream_id(const std::string& name);

}  // namespace ripbench
