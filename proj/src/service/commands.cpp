// SPDX-License-Identifier: Apache-2.0
#include "netsim/service/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "netsim/behavior/evaluation.hpp"
#include "netsim/behavior/ingest.hpp"
#include "netsim/behavior/postprocess.hpp"
#include "netsim/behavior/preprocess.hpp"
#include "netsim/behavior/synthetic.hpp"
#include "netsim/behavior/traffic.hpp"
#include "netsim/behavior/trajectory_vae.hpp"
#include "netsim/error.hpp"
#include "netsim/net/coverage_map.hpp"
#include "netsim/orchestrator/episode.hpp"
#include "netsim/orchestrator/population.hpp"
#include "netsim/rl/optimizers.hpp"
#include "netsim/scenario/structured_text.hpp"
#include "netsim/service/server.hpp"

namespace netsim::service {

namespace fs = std::filesystem;

namespace {

std::shared_ptr<const Scenario> load_scenario(const std::string& path) {
  return std::make_shared<const Scenario>(parse_scenario(path));
}

fs::path output_dir(const std::string& out) {
  if (out.empty()) throw UsageError("--out is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create output directory '{}': {}", out, ec.message()));
  return fs::path(out);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  f << text;
  if (!f.flush()) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

GeoGrid token_grid(const Scenario& sc, double resolution_m) {
  if (resolution_m <= 0.0) return sc.grid;
  return GeoGrid(sc.grid.origin(), sc.grid.width(), sc.grid.height(), resolution_m);
}

std::string report_rows(const std::string& name, const behavior::GenerationReport& r) {
  return fmt::format("{},{},{},{}\n", name, config::format_number(r.kl_location),
                     config::format_number(r.kl_stay_duration), config::format_number(r.js_location));
}

constexpr const char* kReportHeader = "set,kl_location,kl_stay_duration,js_location\n";

// The random-walk baseline matches the generated set's length and the real
// set's mean stay.
std::string score_generation(const std::vector<behavior::TrajectorySequence>& real,
                             const std::vector<behavior::TrajectorySequence>& generated, const GeoGrid& grid,
                             std::uint64_t seed) {
  std::size_t steps = 1;
  for (const auto& s : generated) steps = std::max(steps, s.steps.size());
  double stay = 0.0;
  std::size_t n = 0;
  for (const auto& s : real) {
    for (const auto& st : s.steps) {
      stay += st.stay_s;
      ++n;
    }
  }
  auto walk = behavior::random_walk_sequences(grid, std::max<std::size_t>(generated.size(), 1), steps,
                                              n ? stay / static_cast<double>(n) : 3600.0, seed);
  return std::string(kReportHeader) + report_rows("generated", behavior::evaluate_generation(real, generated, grid)) +
         report_rows("random_walk", behavior::evaluate_generation(real, walk, grid));
}

void print_summary(std::ostream& log, const char* label, const orchestrator::KpiSummary& k) {
  fmt::print(log, "{}: coverage {:.2f} %, rsrp {:.2f} dBm, sinr {:.2f} dB, dl {:.3f} Mbps, ul {:.3f} Mbps\n", label,
             k.coverage_pct, k.avg_rsrp_dbm, k.avg_sinr_db, k.dl_mbps, k.ul_mbps);
}

}  // namespace

RewardWeights parse_weights(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--weights: '{}' is not a number", item));
    }
  }
  if (v.size() != 5) throw UsageError("--weights takes five values: coverage,rsrp,sinr,dl,ul");
  return rl::normalize_weights(RewardWeights{v[0], v[1], v[2], v[3], v[4]});
}

void cmd_generate(const GenerateOptions& o, std::ostream& log) {
  auto sc = load_scenario(o.scenario);
  auto model = behavior::load_checkpoint(o.model);
  GeoGrid grid = token_grid(*sc, o.model_resolution_m);
  if (model.vocab != grid.cell_count())
    throw UsageError(fmt::format("model '{}' covers {} cells but the token grid has {}; set --model-resolution",
                                 o.model, model.vocab, grid.cell_count()));
  auto out = output_dir(o.out);
  std::uint64_t seed = o.seed.value_or(sc->seed);

  behavior::GenerationConfig gc;
  gc.n_users = o.n_users;
  gc.steps = o.steps.value_or(model.hyper.max_steps);
  gc.seed = seed;
  gc.time_of_day_start_h = o.time_of_day_h;
  gc.first_user_id = 1;
  auto seqs = behavior::generate_trajectories(model, gc);
  behavior::PostprocessConfig pc;
  pc.walk_speed_mps = sc->sim.walk_speed_mps;
  pc.tick_s = sc->sim.kpi_tick_s;
  behavior::write_waypoint_csv((out / "waypoints.csv").string(),
                               behavior::postprocess_trajectories(seqs, grid, sc->roads, pc));

  std::vector<std::uint64_t> ids;
  for (std::size_t u = 0; u < o.n_users; ++u) ids.push_back(u + 1);
  TrafficConfig traffic = sc->traffic;
  if (!o.clusters.empty()) traffic.clusters_file = o.clusters;
  auto sessions = traffic.clusters_file.empty() ? orchestrator::poisson_sessions(traffic, ids, o.horizon_s, seed)
                                                : orchestrator::cluster_sessions(traffic, ids, o.horizon_s, seed);
  behavior::write_session_csv((out / "sessions.csv").string(), sessions);
  fmt::print(log, "wrote {} trajectories and {} sessions to {}\n", seqs.size(), sessions.size(), out.string());

  if (!o.real.empty()) {
    auto real = behavior::read_sequence_csv(o.real);
    log << score_generation(real, seqs, grid, seed);
  }
}

void cmd_simulate(const SimulateOptions& o, std::ostream& log) {
  auto sc = load_scenario(o.scenario);
  if (o.ticks < 1) throw UsageError("--ticks must be at least 1");
  orchestrator::SimConfig cfg;
  cfg.scenario = sc;
  if (!o.overrides.empty()) cfg.overrides = orchestrator::load_overrides(o.overrides);
  cfg.episode_ticks = o.ticks;
  cfg.seed = o.seed.value_or(sc->seed);
  auto out = output_dir(o.out);
  auto result = orchestrator::run_episode(cfg);
  write_file(out / "kpi.csv", orchestrator::kpi_csv(result));
  write_file(out / "summary.csv", orchestrator::summary_csv(result));
  if (o.coverage_map) {
    channel::ChannelModel channel(*sc, cfg.seed);
    auto sites = orchestrator::apply_overrides(sc->sites, cfg.overrides);
    net::write_coverage_csv((out / "coverage.csv").string(), net::coverage_map(channel, sites, sc->sim));
  }
  print_summary(log, "summary", result.summary);
}

void cmd_optimize(const OptimizeOptions& o, std::ostream& log) {
  if (o.algo != "hill" && o.algo != "cem") throw UsageError(fmt::format("unknown --algo '{}'", o.algo));
  if (o.budget < 1) throw UsageError("--budget must be at least 1");
  if (o.algo == "cem" && o.budget < 4) throw UsageError("--algo cem needs a budget of at least 4");
  if (o.window < 1) throw UsageError("--window must be at least 1");
  auto sc = load_scenario(o.scenario);
  RewardWeights w = rl::normalize_weights(o.weights.value_or(sc->reward.value_or(RewardWeights{})));
  std::uint64_t seed = o.seed.value_or(sc->seed);
  auto out = output_dir(o.out);

  rl::ConfigEvaluator evaluator(*sc, seed, w, o.window);
  rl::OptimizeResult result;
  if (o.algo == "hill") {
    result = rl::hill_climb(evaluator, o.budget, seed);
  } else {
    rl::CemConfig c;
    c.population = std::min<std::size_t>(c.population, o.budget);
    c.iters = o.budget / c.population - 1;
    c.seed = seed;
    result = rl::cross_entropy(evaluator, c);
  }
  write_file(out / "overrides.toml", orchestrator::serialize_overrides(rl::overrides_for(result.best_sites)));
  write_file(out / "progress.csv", rl::progress_csv(result));
  print_summary(log, "baseline", evaluator.baseline());
  print_summary(log, "best", result.best_kpis);
  fmt::print(log, "best reward {} after {} evaluations\n", config::format_number(result.best_reward),
             result.progress.size());
}

void cmd_train_mobility(const TrainOptions& o, std::ostream& log) {
  if (o.synthetic == !o.fixes.empty()) throw UsageError("give exactly one of --fixes and --synthetic");
  GeoGrid grid;
  std::vector<behavior::MobilityFix> fixes;
  if (o.synthetic) {
    behavior::CommuteCorpusConfig cc;
    cc.n_users = o.corpus_users;
    cc.days = o.corpus_days;
    grid = behavior::commute_grid(cc);
    fixes = behavior::synthetic_commute_fixes(cc, o.corpus_seed);
  } else {
    if (o.scenario.empty()) throw UsageError("--fixes needs --scenario for the grid and geo reference");
    auto sc = load_scenario(o.scenario);
    if (!sc->geo_reference) throw UsageError(fmt::format("scenario '{}' has no geo reference", o.scenario));
    grid = token_grid(*sc, o.model_resolution_m);
    fixes = behavior::ingest_mobility_csv(o.fixes, *sc->geo_reference);
  }
  auto out = output_dir(o.out);
  auto seqs = behavior::split_by_day(behavior::preprocess(fixes, grid));
  behavior::write_sequence_csv((out / "sequences.csv").string(), seqs);

  behavior::VaeHyperParams hp;
  hp.epochs = o.epochs;
  hp.learning_rate = o.learning_rate;
  hp.batch_size = o.batch_size;
  hp.latent_dim = o.latent_dim;
  hp.hidden_dim = o.hidden_dim;
  hp.max_steps = o.max_steps;
  std::string loss_rows = "epoch,loss\n";
  auto result = behavior::train_trajectory_vae(seqs, grid.cell_count(), hp, o.seed, [&](std::size_t epoch, double loss) {
    loss_rows += fmt::format("{},{}\n", epoch, config::format_number(loss));
    fmt::print(log, "epoch {} loss {:.4f}\n", epoch, loss);
  });
  behavior::save_checkpoint(result.model, (out / "model.ckpt").string());
  write_file(out / "loss.csv", loss_rows);
  fmt::print(log, "trained on {} sequences over {} cells\n", seqs.size(), grid.cell_count());

  if (!o.packets.empty()) {
    auto packets = behavior::resolve_app_labels(behavior::ingest_packet_csv(o.packets));
    std::size_t n_apps = o.n_apps;
    if (n_apps == 0) {
      for (const auto& p : packets)
        if (p.app_label) n_apps = std::max(n_apps, static_cast<std::size_t>(*p.app_label) + 1);
    }
    if (n_apps == 0) throw UsageError("no application labels found; set --n-apps");
    behavior::TrafficModel tm;
    tm.clusters = behavior::cluster_app_actions(packets, n_apps, {}, o.seed);
    tm.preferences = behavior::build_preference_vectors(packets, n_apps);
    behavior::save_traffic_model(tm, (out / "traffic.json").string());
    fmt::print(log, "clustered {} applications\n", tm.clusters.apps.size());
  }
}

void cmd_eval_gen(const EvalOptions& o, std::ostream& log) {
  if (o.synthetic == !o.scenario.empty()) throw UsageError("give exactly one of --scenario and --synthetic");
  auto model = behavior::load_checkpoint(o.model);
  GeoGrid grid = o.synthetic ? behavior::commute_grid({}) : token_grid(*load_scenario(o.scenario), o.model_resolution_m);
  if (model.vocab != grid.cell_count())
    throw UsageError(fmt::format("model '{}' covers {} cells but the token grid has {}", o.model, model.vocab,
                                 grid.cell_count()));
  auto real = behavior::read_sequence_csv(o.real);
  std::uint64_t seed = o.seed.value_or(1);
  behavior::GenerationConfig gc;
  gc.n_users = o.n_users.value_or(real.size());
  gc.steps = model.hyper.max_steps;
  gc.seed = seed;
  gc.time_of_day_start_h = 0.0;
  auto generated = behavior::generate_trajectories(model, gc);
  std::string report = score_generation(real, generated, grid, seed);
  log << report;
  if (!o.out.empty()) write_file(o.out, report);
}

void cmd_serve(const ServeOptions& o, std::ostream& log) {
  ServerConfig cfg;
  cfg.host = o.host;
  cfg.port = o.port;
  cfg.env = o.env;
  Server server(load_scenario(o.scenario), cfg);
  fmt::print(log, "listening on {}:{}\n", o.host, server.port());
  log.flush();
  server.run();
}

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingField:
    case ErrorCode::OutOfRange:
    case ErrorCode::MalformedSyntax:
    case ErrorCode::UnknownKey:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::BadRow:
    case ErrorCode::EmptyInput:
    case ErrorCode::InvalidCheckpoint:
    case ErrorCode::MismatchedApps:
    case ErrorCode::UnknownBeam:
    case ErrorCode::InvalidOverride:
    case ErrorCode::InvalidArgument:
    case ErrorCode::Io:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

template <class T>
void seed_option(CLI::App* cmd, std::optional<T>& target, const char* help) {
  cmd->add_option_function<std::uint64_t>("--seed", [&target](const std::uint64_t& v) { target = v; }, help);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radio access network simulator and antenna optimization environment", "netsim"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Generate user trajectories and service sessions from a trained model");
  g->add_option("--scenario", gen.scenario, "Scenario file (grid, roads, traffic)")->required();
  g->add_option("--model", gen.model, "Trajectory model checkpoint")->required();
  g->add_option("--out", gen.out, "Output directory for waypoints.csv and sessions.csv")->required();
  seed_option(g, gen.seed, "Random seed (default: the scenario seed)");
  g->add_option("--n-users", gen.n_users, "Number of users to generate")->capture_default_str();
  g->add_option_function<std::size_t>("--steps", [&](const std::size_t& v) { gen.steps = v; },
                                      "Trajectory steps per user (default: the model's max)");
  g->add_option("--model-resolution", gen.model_resolution_m, "Cell size of the model's token grid in m (0: scenario grid)");
  g->add_option("--time-of-day", gen.time_of_day_h, "Start hour of generated days")->capture_default_str();
  g->add_option("--horizon", gen.horizon_s, "Session horizon in seconds")->capture_default_str();
  g->add_option("--clusters", gen.clusters, "Traffic model JSON (default: the scenario's traffic settings)");
  g->add_option("--real", gen.real, "Sequence CSV to score the generated trajectories against");

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Run one episode and write per-tick KPIs and their summary");
  s->add_option("--scenario", sim.scenario, "Scenario file")->required();
  s->add_option("--out", sim.out, "Output directory for kpi.csv and summary.csv")->required();
  seed_option(s, sim.seed, "Random seed (default: the scenario seed)");
  s->add_option("--ticks", sim.ticks, "Episode length in ticks")->capture_default_str();
  s->add_option("--overrides", sim.overrides, "Beam override file, as written by optimize");
  s->add_flag("--coverage-map", sim.coverage_map, "Also write the best-server map to coverage.csv");

  OptimizeOptions opt;
  std::string weights;
  auto* o = app.add_subcommand("optimize", "Search beam configurations that maximize the KPI reward");
  o->add_option("--scenario", opt.scenario, "Scenario file")->required();
  o->add_option("--out", opt.out, "Output directory for overrides.toml and progress.csv")->required();
  seed_option(o, opt.seed, "Random seed (default: the scenario seed)");
  o->add_option("--algo", opt.algo, "Search algorithm")->check(CLI::IsMember({"hill", "cem"}))->capture_default_str();
  o->add_option("--budget", opt.budget, "Number of configuration evaluations")->capture_default_str();
  o->add_option("--window", opt.window, "Ticks per evaluation")->capture_default_str();
  o->add_option("--weights", weights, "Reward weights coverage,rsrp,sinr,dl,ul (default: the scenario's)");

  TrainOptions train;
  auto* t = app.add_subcommand("train-mobility", "Train the trajectory model, and optionally the traffic model");
  t->add_option("--out", train.out, "Output directory for model.ckpt, sequences.csv and loss.csv")->required();
  t->add_option("--seed", train.seed, "Training seed")->capture_default_str();
  t->add_option("--fixes", train.fixes, "Mobility CSV (user_id,timestamp,lat,lon[,alt])");
  t->add_option("--scenario", train.scenario, "Scenario giving the grid and geo reference for --fixes");
  t->add_option("--model-resolution", train.model_resolution_m, "Token grid cell size in m (0: scenario grid)");
  t->add_flag("--synthetic", train.synthetic, "Train on the built-in commute corpus");
  t->add_option("--corpus-users", train.corpus_users, "Commute corpus users")->capture_default_str();
  t->add_option("--corpus-days", train.corpus_days, "Commute corpus days")->capture_default_str();
  t->add_option("--corpus-seed", train.corpus_seed, "Commute corpus seed")->capture_default_str();
  t->add_option("--epochs", train.epochs, "Training epochs")->capture_default_str();
  t->add_option("--lr", train.learning_rate, "Adam learning rate")->capture_default_str();
  t->add_option("--batch", train.batch_size, "Minibatch size")->capture_default_str();
  t->add_option("--latent", train.latent_dim, "Latent dimension")->capture_default_str();
  t->add_option("--hidden", train.hidden_dim, "Recurrent hidden size")->capture_default_str();
  t->add_option("--max-steps", train.max_steps, "Longest modelled sequence")->capture_default_str();
  t->add_option("--packets", train.packets, "Packet CSV for the traffic model (written to traffic.json)");
  t->add_option("--n-apps", train.n_apps, "Application count (0: from the labels)")->capture_default_str();

  EvalOptions ev;
  auto* e = app.add_subcommand("eval-gen", "Score a trajectory model against real sequences and a random walk");
  e->add_option("--model", ev.model, "Trajectory model checkpoint")->required();
  e->add_option("--real", ev.real, "Sequence CSV of held-out real trajectories")->required();
  e->add_option("--scenario", ev.scenario, "Scenario giving the token grid");
  e->add_option("--model-resolution", ev.model_resolution_m, "Token grid cell size in m (0: scenario grid)");
  e->add_flag("--synthetic", ev.synthetic, "Use the commute corpus grid");
  seed_option(e, ev.seed, "Generation seed (default 1)");
  e->add_option_function<std::size_t>("--n-users", [&](const std::size_t& v) { ev.n_users = v; },
                                      "Generated users (default: one per real sequence)");
  e->add_option("--out", ev.out, "Report CSV path");

  ServeOptions srv;
  auto* v = app.add_subcommand("serve", "Serve the environment over the line protocol");
  v->add_option("--scenario", srv.scenario, "Scenario file")->required();
  v->add_option("--host", srv.host, "Listen address")->capture_default_str();
  v->add_option("--port", srv.port, "Listen port (0: any free port)")->capture_default_str();
  v->add_option("--window", srv.env.window_ticks, "Ticks per evaluation")->capture_default_str();
  v->add_option("--max-steps", srv.env.max_steps, "Steps per episode")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) cmd_generate(gen, out);
    if (s->parsed()) cmd_simulate(sim, out);
    if (o->parsed()) {
      if (!weights.empty()) opt.weights = parse_weights(weights);
      cmd_optimize(opt, out);
    }
    if (t->parsed()) cmd_train_mobility(train, out);
    if (e->parsed()) cmd_eval_gen(ev, out);
    if (v->parsed()) cmd_serve(srv, out);
  } catch (const UsageError& ex) {
    fmt::print(err, "error: {}\n", ex.what());
    return kExitUsage;
  } catch (const Error& ex) {
    fmt::print(err, "error: {}\n", ex.what());
    return exit_code_for(ex.code());
  } catch (const std::exception& ex) {
    fmt::print(err, "error: {}\n", ex.what());
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace netsim::service
