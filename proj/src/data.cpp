#include "ripbench/data.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ripbench/dataset_io.hpp"
#include "ripbench/kernels.hpp"

namespace ripbench {

void DomainSpec::validate() const {
  if (K < 2 || d < 1) throw InvalidInput("DomainSpec: need K >= 2 and d >= 1");
  if (static_cast<int>(class_means.size()) != K) throw InvalidInput("DomainSpec: class_means must have K rows");
  for (const auto& m : class_means)
    if (static_cast<int>(m.size()) != d) throw InvalidInput("DomainSpec: class mean has wrong dimension");
  if (static_cast<int>(shift.size()) != d) throw InvalidInput("DomainSpec: shift has wrong dimension");
  if (!(noise_scale > 0.0)) throw InvalidInput("DomainSpec: noise_scale must be positive");
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j)
      if (class_means[static_cast<std::size_t>(i)] == class_means[static_cast<std::size_t>(j)])
        throw InvalidInput("DomainSpec: class means must be distinct");
}

DomainSpec DomainSpec::with_shift(FeatureVector s) const {
  DomainSpec out = *this;
  out.shift = std::move(s);
  return out;
}

DomainSpec DomainSpec::unshifted() const { return with_shift(FeatureVector(static_cast<std::size_t>(d), 0.0)); }

DomainSpec random_domain(int K, int d, double spread, double noise_scale, double shift_norm, RngStream rng) {
  DomainSpec dom;
  dom.K = K;
  dom.d = d;
  dom.noise_scale = noise_scale;
  const double scale = spread / std::sqrt(2.0);
  dom.class_means.assign(static_cast<std::size_t>(K), FeatureVector(static_cast<std::size_t>(d)));
  for (auto& m : dom.class_means)
    for (double& v : m) v = rng.normal() * scale;
  dom.shift.assign(static_cast<std::size_t>(d), 0.0);
  double norm2 = 0.0;
  for (double& v : dom.shift) {
    v = rng.normal();
    norm2 += v * v;
  }
  const double norm = std::sqrt(norm2);
  for (double& v : dom.shift) v = norm > 0.0 ? v / norm * shift_norm : 0.0;
  dom.validate();
  return dom;
}

LabeledDataset gen_blobs(const DomainSpec& dom, std::size_t n, RngStream& rng) {
  dom.validate();
  if (n < static_cast<std::size_t>(dom.K)) throw InvalidInput("gen_blobs: n must be at least K");
  LabeledDataset ds;
  ds.num_classes = dom.K;
  ds.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    LabeledSample s;
    s.label = static_cast<ClassLabel>(rng.below(static_cast<std::uint64_t>(dom.K)));
    const auto& mu = dom.class_means[static_cast<std::size_t>(s.label)];
    s.features.resize(static_cast<std::size_t>(dom.d));
    for (std::size_t j = 0; j < s.features.size(); ++j)
      s.features[j] = mu[j] + dom.shift[j] + dom.noise_scale * rng.normal();
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

ModelParams ModelParams::zeros(int K, int d) {
  ModelParams m;
  m.K = K;
  m.d = d;
  m.W.assign(static_cast<std::size_t>(K) * static_cast<std::size_t>(d), 0.0);
  m.b.assign(static_cast<std::size_t>(K), 0.0);
  return m;
}

std::vector<double> ModelParams::logits(const FeatureVector& x) const {
  if (static_cast<int>(x.size()) != d) throw InvalidInput("ModelParams: feature dimension mismatch");
  const auto& kt = kernels::active();
  std::vector<double> z(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const double* row = W.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(d);
    z[static_cast<std::size_t>(k)] = kt.dot(row, x.data(), x.size()) + b[static_cast<std::size_t>(k)];
  }
  return z;
}

ProbVector ModelParams::probs(const FeatureVector& x) const { return softmax(logits(x)); }

ClassLabel ModelParams::predict(const FeatureVector& x) const { return argmax_label(probs(x)); }

void write_params_csv(std::ostream& os, const ModelParams& m) {
  os << m.K << ',' << m.d << '\n';
  bool first = true;
  auto put = [&](double v) {
    if (!first) os << ',';
    os << format_double(v);
    first = false;
  };
  for (double v : m.W) put(v);
  for (double v : m.b) put(v);
  os << '\n';
}

ModelParams read_params_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("params csv: missing shape line");
  int K = 0, d = 0;
  char comma = 0;
  std::istringstream hs(line);
  if (!(hs >> K >> comma >> d) || comma != ',' || K < 1 || d < 1) throw InvalidInput("params csv: bad shape line");
  ModelParams m = ModelParams::zeros(K, d);
  if (!std::getline(is, line)) throw InvalidInput("params csv: missing values line");
  std::istringstream vs(line);
  std::string cell;
  std::vector<double> vals;
  while (std::getline(vs, cell, ',')) vals.push_back(std::stod(cell));
  if (vals.size() != m.W.size() + m.b.size()) throw InvalidInput("params csv: wrong value count");
  std::copy(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(m.W.size()), m.W.begin());
  std::copy(vals.begin() + static_cast<std::ptrdiff_t>(m.W.size()), vals.end(), m.b.begin());
  return m;
}

double accuracy(const ModelParams& m, const LabeledDataset& ds) {
  if (ds.samples.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& s : ds.samples) hit += m.predict(s.features) == s.label ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(ds.samples.size());
}

ModelParams train_source(const LabeledDataset& ds, const TrainConfig& cfg) {
  if (ds.samples.empty()) throw InvalidInput("train_source: empty dataset");
  const int K = ds.num_classes;
  const int d = static_cast<int>(ds.dim());
  ModelParams m = ModelParams::zeros(K, d);
  const double inv_n = 1.0 / static_cast<double>(ds.samples.size());
  std::vector<double> gW(m.W.size()), gb(m.b.size());
  for (int it = 0; it < cfg.max_iters; ++it) {
    std::fill(gW.begin(), gW.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    std::size_t hit = 0;
    for (const auto& s : ds.samples) {
      ProbVector q = m.probs(s.features);
      hit += argmax_label(q) == s.label ? 1 : 0;
      q[static_cast<std::size_t>(s.label)] -= 1.0;
      for (int k = 0; k < K; ++k) {
        const double gk = q[static_cast<std::size_t>(k)] * inv_n;
        double* row = gW.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(d);
        for (int j = 0; j < d; ++j) row[j] += gk * s.features[static_cast<std::size_t>(j)];
        gb[static_cast<std::size_t>(k)] += gk;
      }
    }
    if (static_cast<double>(hit) * inv_n >= cfg.target_accuracy) break;
    for (std::size_t i = 0; i < m.W.size(); ++i) m.W[i] -= cfg.lr * gW[i];
    for (std::size_t i = 0; i < m.b.size(); ++i) m.b[i] -= cfg.lr * gb[i];
  }
  return m;
}

}  // namespace ripbench
