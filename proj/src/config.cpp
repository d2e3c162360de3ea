#include "ripbench/config.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "ripbench/metrics.hpp"

namespace ripbench {

Json default_config() {
  return Json::parse(R"({
    "mode": "attack",
    "seed": 0,
    "out": "",
    "scenario": {"K": 10, "d": 16, "spread": 0.3, "noise": 0.25, "shift": 0.5,
                 "n_source": 2000, "n_attack": 5000, "n_probe": 2000},
    "tta": {"loss": "ce", "predictor": "teacher", "aug_level": 5, "alpha": 0.99,
            "update_scheme": "mean-teacher", "lambda": 0.0, "src_replay": false, "replay_m": 0, "lr": 0.001},
    "attack": {"T_a": 500, "B": 64, "trials": 10, "eval_every": 25, "oracle_eval": true, "victim_class": -1,
               "clean": false},
    "gmmc": {"n_pool": 1000, "steps": 120, "alpha": 0.9, "sigma": 0.2, "aug": true, "ips": true, "batch": 64,
             "victim": 0, "eval_every": 20, "means": [-1.0, 2.0], "stddevs": [1.0, 1.0]},
    "sweep": {"layout": "axes", "losses": ["ent", "ce", "rmt", "slr"], "aug_levels": [1, 2, 3, 4, 5],
              "predictors": ["teacher", "student"], "alphas": [0.0, 0.5, 0.9, 0.95, 0.99, 1.0],
              "defenses": ["none", "src-replay", "src-ensemble"], "augfree_losses_skip_aug": true,
              "threads": 0},
    "server": {"host": "127.0.0.1", "port": 0, "allow_reset": false, "max_batch": 4096}
  })");
}

void merge_config(Json& base, const Json& patch, const std::string& path) {
  if (!patch.is_object()) throw std::invalid_argument("config" + path + " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path + "." + it.key();
    if (!base.contains(it.key())) throw std::invalid_argument("unknown config key " + key.substr(1));
    Json& slot = base[it.key()];
    if (slot.is_object()) merge_config(slot, it.value(), key);
    else slot = it.value();
  }
}

Json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config " + path);
  try {
    return Json::parse(f);
  } catch (const std::exception& e) {
    throw std::runtime_error("config " + path + ": " + e.what());
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const Json& file_config) {
  if (flag) return *flag;
  if (file_config.is_object() && file_config.contains("seed")) return file_config["seed"].get<std::uint64_t>();
  if (const char* env = std::getenv("RIPBENCH_SEED"); env != nullptr && *env != '\0') {
    std::size_t used = 0;
    const std::string s(env);
    std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument("RIPBENCH_SEED is not an integer: " + s);
    return v;
  }
  return 0;
}

std::string config_digest(const Json& cfg) {
  Json c = cfg;
  c.erase("out");
  c.erase("mode");
  c.erase("server");
  if (c.contains("sweep") && c["sweep"].is_object()) c["sweep"].erase("threads");
  return digest_hex(c.dump());
}

}  // namespace ripbench
