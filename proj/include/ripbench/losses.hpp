#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ripbench/core.hpp"

namespace ripbench {

enum class LossKind { Ent, CE, SCE, SLR, RMT };

std::string to_string(LossKind k);
LossKind parse_loss_kind(const std::string& s);

struct LossEval {
  double value = 0.0;
  std::vector<double> grad_logits;
};

double ent_loss(const ProbVector& q);
double ce_loss(const ProbVector& p, const ProbVector& q);
double sce_loss(const ProbVector& p, const ProbVector& q);
double slr_loss(const ProbVector& p, const ProbVector& q, double w);
double rmt_loss(const ProbVector& p, const ProbVector& q_clean, const ProbVector& q_aug);

// Value and gradient at q = softmax(z); p is the constant target.
// RMT here scores a single branch (q_clean = q_aug = q); rmt_loss_grad handles two.
LossEval loss_grad_logits(LossKind kind, const std::optional<ProbVector>& p, const std::vector<double>& z,
                          double w = 1.0);

struct RmtEval {
  double value = 0.0;
  std::vector<double> grad_clean;
  std::vector<double> grad_aug;
};
RmtEval rmt_loss_grad(const ProbVector& p, const std::vector<double>& z_clean, const std::vector<double>& z_aug);

}  // namespace ripbench
