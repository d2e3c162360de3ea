#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ripbench/augment.hpp"
#include "ripbench/core.hpp"
#include "ripbench/data.hpp"
#include "ripbench/losses.hpp"

namespace ripbench {

enum class Predictor { Teacher, Student };
enum class UpdateScheme { MeanTeacher, SourceEnsemble };

std::string to_string(Predictor p);
std::string to_string(UpdateScheme s);
Predictor parse_predictor(const std::string& s);
UpdateScheme parse_update_scheme(const std::string& s);

struct SrcReplay {
  int m = 0;  // 0 means half the adaptation batch
  LabeledDataset pool;
};

struct TtaConfig {
  LossKind loss = LossKind::CE;
  Predictor predictor = Predictor::Teacher;
  AugConfig aug = aug_level(5);
  double alpha = 0.99;
  UpdateScheme update_scheme = UpdateScheme::MeanTeacher;
  double lambda = 0.0;
  std::optional<SrcReplay> src_replay;
  double lr = 1e-3;
  double slr_weight = 1.0;
  // Per-sample SLR weight from the predictor's soft output; overrides slr_weight when set.
  std::function<double(const ProbVector&)> slr_weight_fn;

  void validate() const;
};

struct OptimizerState {
  std::vector<double> mW, vW, mb, vb;
  long t = 0;

  static OptimizerState zeros_like(const ModelParams& p);
  bool operator==(const OptimizerState&) const = default;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

struct AdaptState {
  ModelParams student;
  ModelParams teacher;
  ModelParams source;
  OptimizerState opt;
  long t = 0;
  double last_loss = 0.0;  // objective value of the most recent step

  static AdaptState init(const ModelParams& source);
  bool operator==(const AdaptState&) const = default;
};

// Deployed output: the teacher.
ProbVector predict(const AdaptState& state, const FeatureVector& x);
ClassLabel predict_label(const AdaptState& state, const FeatureVector& x);

std::vector<ProbVector> pseudo_labels(const AdaptState& state, const std::vector<FeatureVector>& batch,
                                      Predictor predictor);

ModelParams ema_update(const ModelParams& teacher, const ModelParams& student, double alpha);
ModelParams source_ensemble_update(const ModelParams& source, const ModelParams& student, double alpha);
// grads has the same layout as params.
std::pair<OptimizerState, ModelParams> optimizer_step(const OptimizerState& opt, const ModelParams& params,
                                                      const ModelParams& grads, double lr);

// Returns the state after one update and the labels the pre-update teacher assigned to the batch.
std::pair<AdaptState, std::vector<ClassLabel>> adapt_step(const AdaptState& state,
                                                          const std::vector<FeatureVector>& batch,
                                                          const TtaConfig& cfg, RngStream& rng);

// A victim deployment: adapts on every submitted batch.
class TtaEngine {
 public:
  TtaEngine(const ModelParams& source, TtaConfig cfg, RngStream rng);

  std::vector<ClassLabel> submit(const std::vector<FeatureVector>& batch);
  // Teacher labels without adapting; experimenter-side evaluation only.
  std::vector<ClassLabel> evaluate(const std::vector<FeatureVector>& batch) const;
  // Back to theta0 with fresh optimizer moments. Without a stream the original one is replayed.
  void reset(std::optional<RngStream> rng = std::nullopt);

  const AdaptState& state() const { return state_; }
  const TtaConfig& config() const { return cfg_; }

 private:
  TtaConfig cfg_;
  RngStream rng0_;
  RngStream rng_;
  AdaptState state_;
};

}  // namespace ripbench
