#pragma once

#include <fstream>
#include <memory>

#include "cli_common.hpp"
#include "ripbench/attack.hpp"
#include "ripbench/client.hpp"
#include "ripbench/dataset_io.hpp"
#include "ripbench/metrics.hpp"
#include "ripbench/wire.hpp"

namespace ripbench::cli {

struct ClientFlags {
  CommonFlags common;
  std::string host = "127.0.0.1";
  int port = 0;
  std::string attack_data;
  std::string probe;
  std::string labels_out;
};

inline void add_client(CLI::App* app, ClientFlags& f) {
  add_common(app, f.common);
  app->add_option("--host", f.host, "victim host");
  app->add_option("--port", f.port, "victim port")->required();
  app->add_option("--attack-data", f.attack_data, "labeled attack pool CSV")->required();
  app->add_option("--probe", f.probe, "labeled probe CSV")->required();
  app->add_option("--labels-out", f.labels_out, "log of every label reply, one line per query");
}

// The attacker sees only labels, so evaluation is always in-band here.
inline int run_attack_client(ClientFlags f) {
  f.common.in_band = true;
  Json cfg = effective_config("attack-client", f.common);
  const auto seed = cfg["seed"].get<std::uint64_t>();
  LabeledDataset pool = load_dataset_csv(f.attack_data);
  LabeledDataset probe = load_dataset_csv(f.probe);
  const Json& a = cfg["attack"];
  AttackConfig acfg;
  acfg.T_a = a["T_a"].get<int>();
  acfg.B = a["B"].get<int>();
  acfg.trials = a["trials"].get<int>();
  acfg.eval_every = a["eval_every"].get<int>();
  acfg.oracle_eval = false;
  if (a["victim_class"].get<int>() >= 0) acfg.y_a = a["victim_class"].get<int>();
  acfg.D_a = std::move(pool);

  auto channel = LineChannel::connect(f.host, f.port);
  std::unique_ptr<std::ofstream> log;
  if (!f.labels_out.empty()) log = std::make_unique<std::ofstream>(f.labels_out, std::ios::binary);
  RunRecord rec = run_attack(remote_factory(*channel, log.get()), acfg, probe,
                             attacker_stream(seed));
  rec.config_digest = config_digest(cfg);
  rec.seed = seed;
  emit(cfg, [&](std::ostream& os) { write_attack_csv(os, rec); });
  return 0;
}

}  // namespace ripbench::cli
