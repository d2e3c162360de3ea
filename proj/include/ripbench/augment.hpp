#pragma once

#include "ripbench/core.hpp"

namespace ripbench {

struct AugConfig {
  double sigma = 0.0;
  bool enabled = false;

  bool active() const { return enabled && sigma > 0.0; }
};

// Noise strength for augmentation levels 1..5.
double level_to_sigma(int level);
AugConfig aug_level(int level);
AugConfig aug_off();

// x + N(0, sigma^2) per coordinate; returns x unchanged (and draws nothing) when inactive.
FeatureVector awgn(const FeatureVector& x, const AugConfig& cfg, RngStream& rng);
double awgn(double x, const AugConfig& cfg, RngStream& rng);

}  // namespace ripbench
