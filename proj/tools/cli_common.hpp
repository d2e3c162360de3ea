#pragma once

// Flag plumbing shared by ripbench and the standalone attacker client.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ripbench/config.hpp"

namespace ripbench::cli {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> alpha;
  std::optional<int> aug_level;
  std::optional<std::string> loss;
  std::optional<std::string> predictor;
  std::optional<int> trials;
  std::optional<int> rounds;
  std::optional<int> victim_class;
  bool in_band = false;
};

inline void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "JSON config file; flags override it");
  app->add_option("--seed", f.seed, "master seed (fallback: RIPBENCH_SEED)");
  app->add_option("--out", f.out, "output file");
  app->add_option("--alpha", f.alpha, "EMA update rate");
  app->add_option("--aug-level", f.aug_level, "augmentation level 1..5, 0 disables")->check(CLI::Range(0, 5));
  app->add_option("--loss", f.loss, "ent | ce | sce | slr | rmt");
  app->add_option("--predictor", f.predictor, "teacher | student");
  app->add_option("--trials", f.trials, "number of trials");
  app->add_option("--rounds", f.rounds, "adaptation rounds per trial");
  app->add_option("--victim-class", f.victim_class, "fixed victim class (default: drawn per trial)");
}

// Defaults, then the config file, then flags. The resolved seed is written back into the result.
inline Json effective_config(const std::string& mode, const CommonFlags& f) {
  Json cfg = default_config();
  Json file = Json::object();
  if (!f.config_path.empty()) {
    file = load_config_file(f.config_path);
    merge_config(cfg, file);
  }
  cfg["mode"] = mode;
  cfg["seed"] = resolve_seed(f.seed, file);
  if (!f.out.empty()) cfg["out"] = f.out;
  if (f.alpha) cfg["tta"]["alpha"] = *f.alpha;
  if (f.aug_level) cfg["tta"]["aug_level"] = *f.aug_level;
  if (f.loss) cfg["tta"]["loss"] = *f.loss;
  if (f.predictor) cfg["tta"]["predictor"] = *f.predictor;
  if (f.trials) cfg["attack"]["trials"] = *f.trials;
  if (f.rounds) cfg["attack"]["T_a"] = *f.rounds;
  if (f.victim_class) cfg["attack"]["victim_class"] = *f.victim_class;
  if (f.in_band) cfg["attack"]["oracle_eval"] = false;
  return cfg;
}

// Writes through `write` to the --out path, or stdout when none was given.
template <typename Fn>
void emit(const Json& cfg, Fn&& write) {
  const std::string out = cfg["out"].get<std::string>();
  if (out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out);
  write(f);
  if (!f) throw std::runtime_error("write failed: " + out);
}

}  // namespace ripbench::cli
