#include "ripbench/augment.hpp"

#include <array>
#include <string>

#include "ripbench/kernels.hpp"

namespace ripbench {

double level_to_sigma(int level) {
  static constexpr std::array<double, 5> kSchedule = {0.05, 0.10, 0.15, 0.20, 0.30};
  if (level < 1 || level > 5) throw InvalidInput("augmentation level must be in [1, 5], got " + std::to_string(level));
  return kSchedule[static_cast<std::size_t>(level - 1)];
}

AugConfig aug_level(int level) { return AugConfig{level_to_sigma(level), true}; }

AugConfig aug_off() { return AugConfig{0.0, false}; }

FeatureVector awgn(const FeatureVector& x, const AugConfig& cfg, RngStream& rng) {
  if (cfg.sigma < 0.0) throw InvalidInput("awgn: negative sigma");
  if (!cfg.active()) return x;
  FeatureVector noise(x.size());
  for (double& n : noise) n = rng.normal();
  FeatureVector out(x.size());
  kernels::active().add_scaled(out.data(), x.data(), cfg.sigma, noise.data(), x.size());
  return out;
}

double awgn(double x, const AugConfig& cfg, RngStream& rng) {
  if (cfg.sigma < 0.0) throw InvalidInput("awgn: negative sigma");
  if (!cfg.active()) return x;
  return x + cfg.sigma * rng.normal();
}

}  // namespace ripbench
