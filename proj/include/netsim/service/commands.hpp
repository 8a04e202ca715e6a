// SPDX-License-Identifier: Apache-2.0
//
// The `netsim` command line. Each subcommand is also callable directly with
// its option struct; run_cli() parses arguments and maps failures to exit
// codes.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netsim/rl/environment.hpp"

namespace netsim::service {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Raised for bad flag combinations; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerateOptions {
  std::string scenario;
  std::string model;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t n_users = 10;
  std::optional<std::size_t> steps;  // default: the model's max_steps
  double model_resolution_m = 0.0;
  double time_of_day_h = 8.0;
  double horizon_s = 3600.0;
  std::string clusters;  // traffic model; default: the scenario's traffic settings
  std::string real;      // sequence CSV to score the generated set against
};

struct SimulateOptions {
  std::string scenario;
  std::string overrides;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::int64_t ticks = 60;
  bool coverage_map = false;
};

struct OptimizeOptions {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string algo = "hill";
  std::size_t budget = 200;
  std::int64_t window = 60;
  std::optional<RewardWeights> weights;  // default: the scenario's [reward], else coverage only
};

struct TrainOptions {
  std::string out;
  std::uint64_t seed = 1;
  // Input trajectories: a mobility CSV in the scenario's geo frame, or the
  // built-in commute corpus.
  std::string fixes;
  std::string scenario;
  double model_resolution_m = 0.0;
  bool synthetic = false;
  std::size_t corpus_users = 200;
  std::size_t corpus_days = 30;
  std::uint64_t corpus_seed = 2024;
  std::size_t epochs = 8;
  double learning_rate = 3e-3;
  std::size_t batch_size = 32;
  std::size_t latent_dim = 8;
  std::size_t hidden_dim = 32;
  std::size_t max_steps = 32;
  // Optional packet log for the traffic model.
  std::string packets;
  std::size_t n_apps = 0;  // 0: one more than the largest label
};

struct EvalOptions {
  std::string model;
  std::string real;
  std::string scenario;
  double model_resolution_m = 0.0;
  bool synthetic = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_users;  // default: one per real sequence
  std::string out;                     // optional report CSV
};

struct ServeOptions {
  std::string scenario;
  std::string host = "127.0.0.1";
  std::uint16_t port = 5555;
  rl::EnvConfig env;
};

void cmd_generate(const GenerateOptions& o, std::ostream& log);
void cmd_simulate(const SimulateOptions& o, std::ostream& log);
void cmd_optimize(const OptimizeOptions& o, std::ostream& log);
void cmd_train_mobility(const TrainOptions& o, std::ostream& log);
void cmd_eval_gen(const EvalOptions& o, std::ostream& log);
void cmd_serve(const ServeOptions& o, std::ostream& log);

// Parses "coverage,rsrp,sinr,dl,ul".
RewardWeights parse_weights(const std::string& text);

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netsim::service
