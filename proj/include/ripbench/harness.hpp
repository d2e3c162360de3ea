#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ripbench/attack.hpp"
#include "ripbench/config.hpp"
#include "ripbench/data.hpp"
#include "ripbench/gmmc.hpp"
#include "ripbench/tta.hpp"
#include "ripbench/wire.hpp"

namespace ripbench {

struct ScenarioConfig {
  int K = 10;
  int d = 16;
  double spread = 0.3;
  double noise = 0.25;
  double shift = 0.5;
  int n_source = 2000;
  int n_attack = 5000;
  int n_probe = 2000;
};

// Source data and model, plus the shifted test domain the attacker and the experimenter draw from.
struct Scenario {
  DomainSpec target;
  LabeledDataset source;
  LabeledDataset attack_pool;
  LabeledDataset probe;
  ModelParams theta0;
};

Scenario build_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

ScenarioConfig scenario_from_json(const Json& cfg);
// The replay pool is taken from `source` when src_replay is on.
TtaConfig tta_from_json(const Json& cfg, const LabeledDataset& source);
AttackConfig attack_from_json(const Json& cfg, const LabeledDataset& D_a);
GmmcSimConfig gmmc_from_json(const Json& cfg);

// Named RNG streams shared by every entry point, so in-process and networked runs line up.
RngStream victim_stream(std::uint64_t seed, int trial);
RngStream gmmc_stream(std::uint64_t seed);

// Each trial gets a fresh engine at theta0 with its own stream.
VictimFactory engine_factory(const ModelParams& theta0, const TtaConfig& cfg, std::uint64_t seed);

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 0;
  bool allow_reset = false;
  std::size_t max_batch = 4096;
  // Stream for the engine after the n-th reset (n >= 1); unset replays the initial stream.
  std::function<RngStream(int)> stream_after_reset;
};

class VictimServer {
 public:
  VictimServer(TtaEngine& engine, ServerConfig cfg) : engine_(engine), cfg_(std::move(cfg)) {}
  // Processes one request line and returns the reply line.
  std::string handle(const std::string& line);

 private:
  TtaEngine& engine_;
  ServerConfig cfg_;
  int resets_ = 0;
};

// Serves one connection until the peer hangs up. `on_listening` receives the bound port before accept.
void serve_victim(TtaEngine& engine, const ServerConfig& cfg, const std::function<void(int)>& on_listening = {});

enum class Defense { None, SrcReplay, SrcEnsemble };
std::string to_string(Defense d);
Defense parse_defense(const std::string& s);

struct SweepCell {
  LossKind loss = LossKind::CE;
  int aug_level = 5;  // 0: augmentation off
  Predictor predictor = Predictor::Teacher;
  double alpha = 0.99;
  Defense defense = Defense::None;
  bool attacked = true;

  std::string key() const;
  bool operator==(const SweepCell&) const = default;
};

struct SweepResult {
  SweepCell cell;
  RunRecord record;
};

// Baseline from the "tta" section; "axes" varies one factor at a time around it, "grid" takes the product.
// Both layouts append an unattacked baseline cell.
std::vector<SweepCell> sweep_cells(const Json& cfg);
TtaConfig cell_tta_config(const SweepCell& cell, const TtaConfig& base, const LabeledDataset& source);
std::vector<SweepResult> run_sweep(const Json& cfg, const Scenario& scenario, std::uint64_t seed,
                                   const std::vector<SweepCell>& cells);
void write_sweep_summary(std::ostream& os, const std::vector<SweepResult>& results, const std::string& digest,
                         std::uint64_t seed);

}  // namespace ripbench
