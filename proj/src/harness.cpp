#include "ripbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <ostream>
#include <thread>

#include "ripbench/dataset_io.hpp"

namespace ripbench {
namespace {

std::string lower(const std::string& s) {
  std::string l;
  for (char c : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return l;
}

AugConfig aug_from_level(int level) { return level == 0 ? aug_off() : aug_level(level); }

}  // namespace

Scenario build_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  RngStream root(seed, stream_id("scenario"));
  Scenario sc;
  sc.target = random_domain(cfg.K, cfg.d, cfg.spread, cfg.noise, cfg.shift, root.split(stream_id("domain")));
  RngStream src_rng = root.split(stream_id("source"));
  RngStream pool_rng = root.split(stream_id("attack-pool"));
  RngStream probe_rng = root.split(stream_id("probe"));
  sc.source = gen_blobs(sc.target.unshifted(), static_cast<std::size_t>(cfg.n_source), src_rng);
  sc.attack_pool = gen_blobs(sc.target, static_cast<std::size_t>(cfg.n_attack), pool_rng);
  sc.probe = gen_blobs(sc.target, static_cast<std::size_t>(cfg.n_probe), probe_rng);
  sc.theta0 = train_source(sc.source);
  return sc;
}

ScenarioConfig scenario_from_json(const Json& cfg) {
  const Json& s = cfg.at("scenario");
  ScenarioConfig out;
  out.K = s.at("K").get<int>();
  out.d = s.at("d").get<int>();
  out.spread = s.at("spread").get<double>();
  out.noise = s.at("noise").get<double>();
  out.shift = s.at("shift").get<double>();
  out.n_source = s.at("n_source").get<int>();
  out.n_attack = s.at("n_attack").get<int>();
  out.n_probe = s.at("n_probe").get<int>();
  return out;
}

TtaConfig tta_from_json(const Json& cfg, const LabeledDataset& source) {
  const Json& t = cfg.at("tta");
  TtaConfig out;
  out.loss = parse_loss_kind(t.at("loss").get<std::string>());
  out.predictor = parse_predictor(t.at("predictor").get<std::string>());
  out.aug = aug_from_level(t.at("aug_level").get<int>());
  out.alpha = t.at("alpha").get<double>();
  out.update_scheme = parse_update_scheme(t.at("update_scheme").get<std::string>());
  out.lambda = t.at("lambda").get<double>();
  out.lr = t.at("lr").get<double>();
  if (t.at("src_replay").get<bool>()) out.src_replay = SrcReplay{t.at("replay_m").get<int>(), source};
  out.validate();
  return out;
}

AttackConfig attack_from_json(const Json& cfg, const LabeledDataset& D_a) {
  const Json& a = cfg.at("attack");
  AttackConfig out;
  out.T_a = a.at("T_a").get<int>();
  out.B = a.at("B").get<int>();
  out.trials = a.at("trials").get<int>();
  out.eval_every = a.at("eval_every").get<int>();
  out.oracle_eval = a.at("oracle_eval").get<bool>();
  const int v = a.at("victim_class").get<int>();
  if (v >= 0) out.y_a = v;
  out.D_a = D_a;
  out.validate();
  return out;
}

GmmcSimConfig gmmc_from_json(const Json& cfg) {
  const Json& g = cfg.at("gmmc");
  GmmcSimConfig out;
  out.n_pool = g.at("n_pool").get<int>();
  out.steps = g.at("steps").get<int>();
  out.alpha = g.at("alpha").get<double>();
  out.aug = AugConfig{g.at("sigma").get<double>(), g.at("aug").get<bool>()};
  out.ips_enabled = g.at("ips").get<bool>();
  out.batch = g.at("batch").get<int>();
  out.victim = g.at("victim").get<int>();
  out.eval_every = g.at("eval_every").get<int>();
  for (std::size_t k = 0; k < 2; ++k) {
    out.truth.means[k] = g.at("means").at(k).get<double>();
    const double sd = g.at("stddevs").at(k).get<double>();
    out.truth.variances[k] = sd * sd;
  }
  out.validate();
  return out;
}

RngStream victim_stream(std::uint64_t seed, int trial) {
  return RngStream(seed, stream_id("victim")).split(static_cast<std::uint64_t>(trial));
}

RngStream gmmc_stream(std::uint64_t seed) { return RngStream(seed, stream_id("gmmc")); }

VictimFactory engine_factory(const ModelParams& theta0, const TtaConfig& cfg, std::uint64_t seed) {
  return [theta0, cfg, seed](int trial) {
    auto engine = std::make_shared<TtaEngine>(theta0, cfg, victim_stream(seed, trial));
    struct Owning : VictimHandle {
      std::shared_ptr<TtaEngine> e;
      std::vector<ClassLabel> submit(const std::vector<FeatureVector>& b) override { return e->submit(b); }
    };
    auto v = std::make_unique<Owning>();
    v->e = engine;
    VictimSession s;
    s.victim = std::move(v);
    s.oracle = [engine](const std::vector<FeatureVector>& xs) { return engine->evaluate(xs); };
    return s;
  };
}

std::string VictimServer::handle(const std::string& line) {
  TtaEngine& engine = engine_;
  const ServerConfig& cfg = cfg_;
  WireMessage req;
  try {
    req = decode_message(line);
  } catch (const WireError& e) {
    return encode_message(make_error(0, e.what()));
  }
  switch (req.op) {
    case WireOp::Predict: {
      if (req.batch.empty()) return encode_message(make_error(req.id, "empty batch"));
      if (req.batch.size() > cfg.max_batch) return encode_message(make_error(req.id, "batch exceeds max_batch"));
      if (static_cast<int>(req.batch.front().size()) != engine.state().teacher.d)
        return encode_message(make_error(req.id, "feature dimension mismatch"));
      try {
        return encode_message(make_labels(req.id, engine.submit(req.batch)));
      } catch (const std::exception& e) {
        return encode_message(make_error(req.id, e.what()));
      }
    }
    case WireOp::Reset: {
      if (!cfg.allow_reset) return encode_message(make_error(req.id, "reset forbidden"));
      ++resets_;
      if (cfg.stream_after_reset) engine.reset(cfg.stream_after_reset(resets_));
      else engine.reset();
      WireMessage ack;
      ack.op = WireOp::Ack;
      ack.id = req.id;
      return encode_message(ack);
    }
    default: return encode_message(make_error(req.id, "unsupported op " + to_string(req.op)));
  }
}

void serve_victim(TtaEngine& engine, const ServerConfig& cfg, const std::function<void(int)>& on_listening) {
  Listener listener(cfg.port, cfg.host);
  if (on_listening) on_listening(listener.port());
  auto conn = listener.accept();
  VictimServer server(engine, cfg);
  std::string line;
  while (conn->recv_line(line)) {
    if (line == "\n" || line.empty()) continue;
    conn->send_line(server.handle(line));
  }
}

std::string to_string(Defense d) {
  switch (d) {
    case Defense::None: return "none";
    case Defense::SrcReplay: return "src-replay";
    case Defense::SrcEnsemble: return "src-ensemble";
  }
  return "?";
}

Defense parse_defense(const std::string& s) {
  const auto l = lower(s);
  if (l == "none") return Defense::None;
  if (l == "src-replay" || l == "srcreplay") return Defense::SrcReplay;
  if (l == "src-ensemble" || l == "srcensemble") return Defense::SrcEnsemble;
  throw InvalidInput("unknown defense: " + s);
}

std::string SweepCell::key() const {
  return "loss=" + to_string(loss) + ";aug=" + std::to_string(aug_level) + ";pred=" + to_string(predictor) +
         ";alpha=" + format_double(alpha) + ";defense=" + to_string(defense) + (attacked ? ";rip" : ";clean");
}

std::vector<SweepCell> sweep_cells(const Json& cfg) {
  const Json& s = cfg.at("sweep");
  const Json& t = cfg.at("tta");
  SweepCell base;
  base.loss = parse_loss_kind(t.at("loss").get<std::string>());
  base.aug_level = t.at("aug_level").get<int>();
  base.predictor = parse_predictor(t.at("predictor").get<std::string>());
  base.alpha = t.at("alpha").get<double>();
  const bool skip_aug = s.at("augfree_losses_skip_aug").get<bool>();
  auto loss_cell = [&](SweepCell c, LossKind k) {
    c.loss = k;
    if (skip_aug && (k == LossKind::Ent || k == LossKind::SLR)) c.aug_level = 0;
    return c;
  };

  std::vector<SweepCell> cells;
  auto add = [&](const SweepCell& c) {
    if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
  };
  const std::string layout = s.at("layout").get<std::string>();
  if (layout == "axes") {
    add(base);
    for (const auto& l : s.at("losses")) add(loss_cell(base, parse_loss_kind(l.get<std::string>())));
    for (const auto& a : s.at("aug_levels")) {
      SweepCell c = base;
      c.aug_level = a.get<int>();
      add(c);
    }
    for (const auto& p : s.at("predictors")) {
      SweepCell c = base;
      c.predictor = parse_predictor(p.get<std::string>());
      add(c);
    }
    for (const auto& a : s.at("alphas")) {
      SweepCell c = base;
      c.alpha = a.get<double>();
      add(c);
    }
    for (const auto& d : s.at("defenses")) {
      SweepCell c = base;
      c.defense = parse_defense(d.get<std::string>());
      add(c);
    }
  } else if (layout == "grid") {
    for (const auto& l : s.at("losses"))
      for (const auto& a : s.at("aug_levels"))
        for (const auto& p : s.at("predictors"))
          for (const auto& al : s.at("alphas"))
            for (const auto& d : s.at("defenses")) {
              SweepCell c = base;
              c.aug_level = a.get<int>();
              c = loss_cell(c, parse_loss_kind(l.get<std::string>()));
              c.predictor = parse_predictor(p.get<std::string>());
              c.alpha = al.get<double>();
              c.defense = parse_defense(d.get<std::string>());
              add(c);
            }
  } else if (layout == "single") {
    add(base);
    return cells;
  } else {
    throw InvalidInput("unknown sweep layout: " + layout);
  }
  SweepCell clean = base;
  clean.attacked = false;
  add(clean);
  return cells;
}

TtaConfig cell_tta_config(const SweepCell& cell, const TtaConfig& base, const LabeledDataset& source) {
  TtaConfig c = base;
  c.loss = cell.loss;
  c.aug = aug_from_level(cell.aug_level);
  c.predictor = cell.predictor;
  c.alpha = cell.alpha;
  c.src_replay.reset();
  c.update_scheme = UpdateScheme::MeanTeacher;
  if (cell.defense == Defense::SrcReplay) c.src_replay = SrcReplay{0, source};
  if (cell.defense == Defense::SrcEnsemble) c.update_scheme = UpdateScheme::SourceEnsemble;
  c.validate();
  return c;
}

std::vector<SweepResult> run_sweep(const Json& cfg, const Scenario& scenario, std::uint64_t seed,
                                   const std::vector<SweepCell>& cells) {
  const TtaConfig base = tta_from_json(cfg, scenario.source);
  const AttackConfig acfg = attack_from_json(cfg, scenario.attack_pool);
  std::vector<SweepResult> results(cells.size());
  int threads = cfg.at("sweep").at("threads").get<int>();
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(1, cells.size())));
  // Every cell uses the same derived streams: cells differ only in configuration.
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  auto worker = [&](int w) {
    try {
      for (std::size_t i = next++; i < cells.size(); i = next++) {
        const TtaConfig tc = cell_tta_config(cells[i], base, scenario.source);
        VictimFactory f = engine_factory(scenario.theta0, tc, seed);
        results[i].cell = cells[i];
        results[i].record = cells[i].attacked ? run_attack(f, acfg, scenario.probe, attacker_stream(seed))
                                              : run_clean_stream(f, acfg, scenario.probe, attacker_stream(seed));
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(worker, w);
  worker(0);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

void write_sweep_summary(std::ostream& os, const std::vector<SweepResult>& results, const std::string& digest,
                         std::uint64_t seed) {
  os << "# config_digest=" << digest << " seed=" << seed << '\n';
  os << "loss,aug_level,predictor,alpha,defense,stream,trials,final_error,mean_error\n";
  for (const auto& r : results) {
    const auto& c = r.cell;
    os << to_string(c.loss) << ',' << c.aug_level << ',' << to_string(c.predictor) << ',' << format_double(c.alpha)
       << ',' << to_string(c.defense) << ',' << (c.attacked ? "rip" : "clean") << ',' << r.record.finals().size()
       << ',' << format_double(r.record.mean_final_error()) << ',' << format_double(r.record.mean_error()) << '\n';
  }
}

}  // namespace ripbench
