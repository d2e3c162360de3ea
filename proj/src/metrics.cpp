#include "ripbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "ripbench/dataset_io.hpp"

namespace ripbench {

ClasswiseError classwise_error(const std::vector<ClassLabel>& preds, const std::vector<ClassLabel>& truths, int K) {
  if (preds.size() != truths.size()) throw InvalidInput("classwise_error: length mismatch");
  if (K < 1) throw InvalidInput("classwise_error: K must be positive");
  std::vector<std::size_t> total(static_cast<std::size_t>(K), 0), wrong(static_cast<std::size_t>(K), 0);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] < 0 || truths[i] >= K) throw InvalidInput("classwise_error: label out of range");
    auto c = static_cast<std::size_t>(truths[i]);
    ++total[c];
    if (preds[i] != truths[i]) ++wrong[c];
  }
  ClasswiseError out;
  out.per_class.assign(static_cast<std::size_t>(K), 0.0);
  out.present.assign(static_cast<std::size_t>(K), false);
  double sum = 0.0;
  int n = 0;
  for (std::size_t c = 0; c < total.size(); ++c) {
    if (total[c] == 0) continue;
    out.present[c] = true;
    out.per_class[c] = static_cast<double>(wrong[c]) / static_cast<double>(total[c]);
    sum += out.per_class[c];
    ++n;
  }
  out.avg = n > 0 ? sum / n : 0.0;
  return out;
}

ProbVector prediction_marginal(const std::vector<ClassLabel>& preds, int K) {
  ProbVector m(static_cast<std::size_t>(K), 0.0);
  if (preds.empty()) return m;
  for (ClassLabel p : preds) {
    if (p < 0 || p >= K) throw InvalidInput("prediction_marginal: label out of range");
    m[static_cast<std::size_t>(p)] += 1.0;
  }
  for (double& v : m) v /= static_cast<double>(preds.size());
  return m;
}

bool collapse_detect(const std::vector<ProbVector>& marginals, const std::set<ClassLabel>& subset, double epsilon,
                     std::size_t window) {
  if (window == 0 || window > marginals.size()) throw InvalidInput("collapse_detect: window must be in [1, series length]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("collapse_detect: epsilon must be in (0, 1)");
  if (subset.empty()) throw InvalidInput("collapse_detect: empty class subset");
  for (std::size_t i = marginals.size() - window; i < marginals.size(); ++i) {
    double mass = 0.0;
    for (ClassLabel c : subset) {
      if (c < 0 || static_cast<std::size_t>(c) >= marginals[i].size())
        throw InvalidInput("collapse_detect: class outside marginal");
      mass += marginals[i][static_cast<std::size_t>(c)];
    }
    if (!(mass < epsilon)) return false;
  }
  return true;
}

double Checkpoint::victim_marginal() const {
  if (victim < 0 || static_cast<std::size_t>(victim) >= marginal.size()) return std::nan("");
  return marginal[static_cast<std::size_t>(victim)];
}

std::vector<Checkpoint> RunRecord::trial(int t) const {
  std::vector<Checkpoint> out;
  for (const auto& c : checkpoints)
    if (c.trial == t) out.push_back(c);
  return out;
}

std::vector<int> RunRecord::trials() const {
  std::vector<int> ids;
  for (const auto& c : checkpoints)
    if (std::find(ids.begin(), ids.end(), c.trial) == ids.end()) ids.push_back(c.trial);
  return ids;
}

std::vector<Checkpoint> RunRecord::finals() const {
  std::map<int, Checkpoint> last;
  for (const auto& c : checkpoints) {
    auto it = last.find(c.trial);
    if (it == last.end() || c.step >= it->second.step) last[c.trial] = c;
  }
  std::vector<Checkpoint> out;
  for (auto& [t, c] : last) out.push_back(c);
  return out;
}

double RunRecord::mean_final_error() const {
  auto f = finals();
  if (f.empty()) return std::nan("");
  double s = 0.0;
  for (const auto& c : f) s += c.avg_error;
  return s / static_cast<double>(f.size());
}

double RunRecord::mean_error() const {
  if (checkpoints.empty()) return std::nan("");
  double s = 0.0;
  for (const auto& c : checkpoints) s += c.avg_error;
  return s / static_cast<double>(checkpoints.size());
}

void RunRecord::append(const RunRecord& other) {
  checkpoints.insert(checkpoints.end(), other.checkpoints.begin(), other.checkpoints.end());
}

std::string digest_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_metadata_line(std::ostream& os, const RunRecord& r) {
  os << "# config_digest=" << r.config_digest << " seed=" << r.seed << '\n';
}

void write_attack_csv(std::ostream& os, const RunRecord& r) {
  write_metadata_line(os, r);
  os << "trial,step,avg_classwise_error,victim_class_marginal\n";
  for (const auto& c : r.checkpoints)
    os << c.trial << ',' << c.step << ',' << format_double(c.avg_error) << ',' << format_double(c.victim_marginal())
       << '\n';
}

void write_gmmc_csv(std::ostream& os, const RunRecord& r) {
  write_metadata_line(os, r);
  os << "step,marginal_class0,marginal_class1,boundary_location\n";
  for (const auto& c : r.checkpoints) {
    os << c.step << ',' << format_double(c.marginal.at(0)) << ',' << format_double(c.marginal.at(1)) << ',';
    if (std::isfinite(c.boundary)) os << format_double(c.boundary);
    os << '\n';
  }
}

}  // namespace ripbench
