#pragma once

#include <array>
#include <vector>

#include "ripbench/augment.hpp"
#include "ripbench/core.hpp"
#include "ripbench/metrics.hpp"

namespace ripbench {

inline constexpr double kGmmcVarFloor = 1e-3;

struct GmmcParams {
  std::array<double, 2> priors{0.5, 0.5};
  std::array<double, 2> means{-1.0, 2.0};
  std::array<double, 2> variances{1.0, 1.0};

  void validate() const;
  bool operator==(const GmmcParams&) const = default;
};

struct GmmcSimConfig {
  GmmcParams truth;  // data-generating mixture and the classifier's starting point
  int n_pool = 1000;
  int steps = 120;
  double alpha = 0.9;
  AugConfig aug{0.2, true};
  bool ips_enabled = true;
  int batch = 64;
  ClassLabel victim = 0;
  int eval_every = 20;

  void validate() const;
};

ProbVector gmmc_posterior(const GmmcParams& params, double x);
ClassLabel gmmc_predict(const GmmcParams& params, double x);
// Point between the means where the posterior is 1/2; NaN when the boundary does not cross there
// (falls back to the crossing nearest the midpoint if one exists elsewhere).
double gmmc_boundary(const GmmcParams& params);

GmmcParams gmmc_fit_step(const GmmcParams& params, const std::vector<double>& batch, double alpha, const AugConfig& aug,
                         RngStream& rng);

RunRecord gmmc_simulate(const GmmcSimConfig& cfg, RngStream rng);

}  // namespace ripbench
