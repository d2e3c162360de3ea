#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "attack_client.hpp"
#include "cli_common.hpp"
#include "ripbench/harness.hpp"

namespace rb = ripbench;
namespace cli = ripbench::cli;

namespace {

struct Setup {
  rb::Json cfg;
  std::uint64_t seed;
  rb::Scenario scenario;
};

Setup prepare(const std::string& mode, const cli::CommonFlags& f) {
  Setup s{cli::effective_config(mode, f), 0, {}};
  s.seed = s.cfg["seed"].get<std::uint64_t>();
  s.scenario = rb::build_scenario(rb::scenario_from_json(s.cfg), s.seed);
  return s;
}

rb::VictimFactory with_label_log(rb::VictimFactory base, std::ostream* log) {
  if (log == nullptr) return base;
  return [base = std::move(base), log](int trial) {
    rb::VictimSession s = base(trial);
    s.victim = std::make_unique<rb::RecordingVictim>(std::move(s.victim), log);
    return s;
  };
}

int run_stream(const std::string& mode, const cli::CommonFlags& f, const std::string& labels_out, bool attacked) {
  Setup s = prepare(mode, f);
  const rb::TtaConfig tc = rb::tta_from_json(s.cfg, s.scenario.source);
  const rb::AttackConfig ac = rb::attack_from_json(s.cfg, s.scenario.attack_pool);
  std::unique_ptr<std::ofstream> log;
  if (!labels_out.empty()) log = std::make_unique<std::ofstream>(labels_out, std::ios::binary);
  auto factory = with_label_log(rb::engine_factory(s.scenario.theta0, tc, s.seed), log.get());
  rb::RunRecord rec = attacked ? rb::run_attack(factory, ac, s.scenario.probe, rb::attacker_stream(s.seed))
                               : rb::run_clean_stream(factory, ac, s.scenario.probe, rb::attacker_stream(s.seed));
  rec.config_digest = rb::config_digest(s.cfg);
  rec.seed = s.seed;
  cli::emit(s.cfg, [&](std::ostream& os) { rb::write_attack_csv(os, rec); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continual test-time adaptation collapse simulator"};
  app.require_subcommand(1);

  cli::CommonFlags gmmc_f;
  std::optional<double> gmmc_sigma;
  bool gmmc_no_ips = false, gmmc_no_aug = false;
  std::optional<int> gmmc_steps;
  auto* gmmc = app.add_subcommand("gmmc-sim", "two-component mixture collapse simulation");
  cli::add_common(gmmc, gmmc_f);
  gmmc->add_option("--sigma", gmmc_sigma, "augmentation noise (overrides --aug-level)");
  gmmc->add_option("--steps", gmmc_steps, "adaptation steps");
  gmmc->add_flag("--no-ips", gmmc_no_ips, "fresh i.i.d. batches instead of carrying mispredictions");
  gmmc->add_flag("--no-aug", gmmc_no_aug, "train on clean points");

  cli::CommonFlags tta_f;
  std::string tta_labels;
  auto* tta = app.add_subcommand("tta-run", "adaptation on a clean i.i.d. stream (no attacker)");
  cli::add_common(tta, tta_f);
  tta->add_option("--labels-out", tta_labels, "log of every label reply");

  cli::CommonFlags atk_f;
  std::string atk_labels;
  auto* atk = app.add_subcommand("attack", "RIP attack against an in-process victim");
  cli::add_common(atk, atk_f);
  atk->add_flag("--in-band", atk_f.in_band, "measure error by querying the victim (it adapts on the probes)");
  atk->add_option("--labels-out", atk_labels, "log of every label reply");

  cli::CommonFlags sw_f;
  std::optional<std::string> sw_layout;
  std::optional<int> sw_threads;
  std::string sw_records;
  auto* sw = app.add_subcommand("sweep", "ablation and defense sweep; writes a summary CSV");
  cli::add_common(sw, sw_f);
  sw->add_option("--layout", sw_layout, "axes | grid | single");
  sw->add_option("--threads", sw_threads, "worker threads (0: all cores)");
  sw->add_option("--records-dir", sw_records, "also write one RunRecord CSV per cell here");

  cli::CommonFlags sv_f;
  int sv_port = 0;
  bool sv_reset = false;
  std::string sv_host = "127.0.0.1";
  std::size_t sv_max = 4096;
  auto* sv = app.add_subcommand("serve-victim", "serve an adapting victim over NDJSON/TCP (one session)");
  cli::add_common(sv, sv_f);
  sv->add_option("--port", sv_port, "listen port (0 picks one)")->required();
  sv->add_option("--host", sv_host, "listen address");
  sv->add_option("--max-batch", sv_max, "largest accepted batch");
  sv->add_flag("--allow-reset", sv_reset, "honour reset requests");

  cli::ClientFlags cl_f;
  auto* cl = app.add_subcommand("attack-client", "RIP attack against a remote victim");
  cli::add_client(cl, cl_f);

  cli::CommonFlags md_f;
  std::string md_dir;
  auto* md = app.add_subcommand("make-data", "write source, attack-pool and probe CSVs plus source weights");
  cli::add_common(md, md_f);
  md->add_option("--dir", md_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gmmc) {
      rb::Json cfg = cli::effective_config("gmmc-sim", gmmc_f);
      auto& g = cfg["gmmc"];
      if (gmmc_f.alpha) g["alpha"] = *gmmc_f.alpha;
      if (gmmc_f.aug_level) {
        g["aug"] = *gmmc_f.aug_level > 0;
        if (*gmmc_f.aug_level > 0) g["sigma"] = rb::level_to_sigma(*gmmc_f.aug_level);
      }
      if (gmmc_sigma) g["sigma"] = *gmmc_sigma;
      if (gmmc_no_aug) g["aug"] = false;
      if (gmmc_no_ips) g["ips"] = false;
      if (gmmc_steps) g["steps"] = *gmmc_steps;
      const auto seed = cfg["seed"].get<std::uint64_t>();
      rb::RunRecord rec = rb::gmmc_simulate(rb::gmmc_from_json(cfg), rb::gmmc_stream(seed));
      rec.config_digest = rb::config_digest(cfg);
      cli::emit(cfg, [&](std::ostream& os) { rb::write_gmmc_csv(os, rec); });
      return 0;
    }
    if (*tta) return run_stream("tta-run", tta_f, tta_labels, false);
    if (*atk) return run_stream("attack", atk_f, atk_labels, true);
    if (*sw) {
      Setup s = prepare("sweep", sw_f);
      if (sw_layout) s.cfg["sweep"]["layout"] = *sw_layout;
      if (sw_threads) s.cfg["sweep"]["threads"] = *sw_threads;
      auto cells = rb::sweep_cells(s.cfg);
      auto results = rb::run_sweep(s.cfg, s.scenario, s.seed, cells);
      const std::string digest = rb::config_digest(s.cfg);
      if (!sw_records.empty()) {
        std::filesystem::create_directories(sw_records);
        for (std::size_t i = 0; i < results.size(); ++i) {
          rb::RunRecord rec = results[i].record;
          rec.config_digest = digest;
          rec.seed = s.seed;
          std::ofstream f(std::filesystem::path(sw_records) / ("cell_" + std::to_string(i) + ".csv"), std::ios::binary);
          f << "# cell " << results[i].cell.key() << '\n';
          rb::write_attack_csv(f, rec);
        }
      }
      cli::emit(s.cfg, [&](std::ostream& os) { rb::write_sweep_summary(os, results, digest, s.seed); });
      return 0;
    }
    if (*sv) {
      Setup s = prepare("serve-victim", sv_f);
      rb::TtaEngine engine(s.scenario.theta0, rb::tta_from_json(s.cfg, s.scenario.source),
                           rb::victim_stream(s.seed, 0));
      rb::ServerConfig sc;
      sc.host = sv_host;
      sc.port = sv_port;
      sc.allow_reset = sv_reset;
      sc.max_batch = sv_max;
      const auto seed = s.seed;
      sc.stream_after_reset = [seed](int n) { return rb::victim_stream(seed, n); };
      rb::serve_victim(engine, sc, [](int port) { std::cout << "listening " << port << std::endl; });
      return 0;
    }
    if (*cl) return cli::run_attack_client(cl_f);
    if (*md) {
      Setup s = prepare("make-data", md_f);
      std::filesystem::create_directories(md_dir);
      const std::filesystem::path dir(md_dir);
      rb::save_dataset_csv((dir / "source.csv").string(), s.scenario.source);
      rb::save_dataset_csv((dir / "attack.csv").string(), s.scenario.attack_pool);
      rb::save_dataset_csv((dir / "probe.csv").string(), s.scenario.probe);
      std::ofstream p(dir / "theta0.csv", std::ios::binary);
      rb::write_params_csv(p, s.scenario.theta0);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "ripbench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
