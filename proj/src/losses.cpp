#include "ripbench/losses.hpp"

#include <cctype>
#include <cmath>

namespace ripbench {
namespace {

void check_pair(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size()) throw InvalidInput("loss: probability vectors differ in length");
}

double log_c(double q) { return std::log(clamp_prob(q)); }

// Mass on every class except j, summed directly so it stays accurate when q_j is near 1.
double rest_mass(const ProbVector& q, std::size_t j) {
  double r = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (i != j) r += q[i];
  return r;
}

std::vector<double> sce_grad(const ProbVector& p, const ProbVector& q) {
  // d/dz of -(1/2) sum p ln q is (q - p)/2; of -(1/2) sum q ln p is -(q_k/2)(ln p_k - E_q[ln p]).
  double mean_lp = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) mean_lp += q[j] * log_c(p[j]);
  std::vector<double> g(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) g[k] = 0.5 * (q[k] - p[k]) - 0.5 * q[k] * (log_c(p[k]) - mean_lp);
  return g;
}

}  // namespace

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::Ent: return "ent";
    case LossKind::CE: return "ce";
    case LossKind::SCE: return "sce";
    case LossKind::SLR: return "slr";
    case LossKind::RMT: return "rmt";
  }
  return "?";
}

LossKind parse_loss_kind(const std::string& s) {
  std::string l;
  for (char c : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "ent") return LossKind::Ent;
  if (l == "ce") return LossKind::CE;
  if (l == "sce") return LossKind::SCE;
  if (l == "slr") return LossKind::SLR;
  if (l == "rmt") return LossKind::RMT;
  throw InvalidInput("unknown loss kind: " + s);
}

double ent_loss(const ProbVector& q) {
  double h = 0.0;
  for (double v : q) h -= v * log_c(v);
  return h;
}

double ce_loss(const ProbVector& p, const ProbVector& q) {
  check_pair(p, q);
  double l = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) l -= p[j] * log_c(q[j]);
  return l;
}

double sce_loss(const ProbVector& p, const ProbVector& q) {
  check_pair(p, q);
  double l = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) l -= p[j] * log_c(q[j]) + q[j] * log_c(p[j]);
  return 0.5 * l;
}

double slr_loss(const ProbVector& p, const ProbVector& q, double w) {
  check_pair(p, q);
  if (w < 0.0) throw InvalidInput("slr_loss: negative weight");
  double l = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    l -= p[j] * (log_c(q[j]) - log_c(rest_mass(q, j)));
  }
  return w * l;
}

double rmt_loss(const ProbVector& p, const ProbVector& q_clean, const ProbVector& q_aug) {
  return 0.5 * (sce_loss(p, q_clean) + sce_loss(p, q_aug));
}

LossEval loss_grad_logits(LossKind kind, const std::optional<ProbVector>& p, const std::vector<double>& z, double w) {
  ProbVector q = softmax(z);
  const std::size_t K = q.size();
  LossEval out;
  out.grad_logits.assign(K, 0.0);
  if (kind == LossKind::Ent) {
    out.value = ent_loss(q);
    for (std::size_t k = 0; k < K; ++k) out.grad_logits[k] = -q[k] * (log_c(q[k]) + out.value);
    return out;
  }
  if (!p) throw InvalidInput("loss_grad_logits: " + to_string(kind) + " needs a target distribution");
  check_pair(*p, q);
  const ProbVector& t = *p;
  switch (kind) {
    case LossKind::CE:
      out.value = ce_loss(t, q);
      for (std::size_t k = 0; k < K; ++k) out.grad_logits[k] = q[k] - t[k];
      break;
    case LossKind::SCE:
    case LossKind::RMT:
      out.value = sce_loss(t, q);
      out.grad_logits = sce_grad(t, q);
      break;
    case LossKind::SLR: {
      out.value = slr_loss(t, q, w);
      // grad_k = -w (p_k / r_k - q_k sum_j p_j / r_j), r_j = 1 - q_j
      std::vector<double> ratio(K);
      double s = 0.0;
      for (std::size_t j = 0; j < K; ++j) {
        ratio[j] = t[j] == 0.0 ? 0.0 : t[j] / clamp_prob(rest_mass(q, j));
        s += ratio[j];
      }
      for (std::size_t k = 0; k < K; ++k) out.grad_logits[k] = -w * (ratio[k] - q[k] * s);
      break;
    }
    case LossKind::Ent:
      break;
  }
  return out;
}

RmtEval rmt_loss_grad(const ProbVector& p, const std::vector<double>& z_clean, const std::vector<double>& z_aug) {
  ProbVector qc = softmax(z_clean);
  ProbVector qa = softmax(z_aug);
  check_pair(p, qc);
  check_pair(p, qa);
  RmtEval out;
  out.value = rmt_loss(p, qc, qa);
  out.grad_clean = sce_grad(p, qc);
  out.grad_aug = sce_grad(p, qa);
  for (double& g : out.grad_clean) g *= 0.5;
  for (double& g : out.grad_aug) g *= 0.5;
  return out;
}

}  // namespace ripbench
