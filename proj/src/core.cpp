#include "ripbench/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ripbench {

ProbVector softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw InvalidInput("softmax: empty logits");
  double mx = logits[0];
  for (double z : logits) {
    if (!std::isfinite(z)) throw InvalidInput("softmax: non-finite logit");
    mx = std::max(mx, z);
  }
  ProbVector out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

ClassLabel argmax_label(const ProbVector& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return static_cast<ClassLabel>(best);
}

ProbVector one_hot(ClassLabel k, int num_classes) {
  if (k < 0 || k >= num_classes) throw InvalidInput("one_hot: label out of range");
  ProbVector p(static_cast<std::size_t>(num_classes), 0.0);
  p[static_cast<std::size_t>(k)] = 1.0;
  return p;
}

double clamp_prob(double q) { return std::max(q, kProbEps); }

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_id(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(mix64(seed ^ mix64(stream_id ^ 0x5851f42d4c957f2dULL))) {}

std::uint64_t RngStream::next_u64() {
  std::uint64_t c = counter_++;
  return mix64(key_ ^ mix64(c));
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t RngStream::below(std::uint64_t n) {
  if (n == 0) throw InvalidInput("RngStream::below: n must be positive");
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    std::uint64_t threshold = (0 - n) % n;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

RngStream RngStream::split(std::uint64_t child) const {
  return RngStream(seed_, mix64(stream_id_ * 0x9e3779b97f4a7c15ULL ^ mix64(child + 1)));
}

}  // namespace ripbench
