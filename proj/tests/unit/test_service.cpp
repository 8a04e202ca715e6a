// SPDX-License-Identifier: Apache-2.0
#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "temp_dir.hpp"
#include "netsim/behavior/ingest.hpp"
#include "netsim/behavior/trajectory_vae.hpp"
#include "netsim/error.hpp"
#include "netsim/rl/optimizers.hpp"
#include "netsim/csv.hpp"
#include "netsim/service/commands.hpp"
#include "netsim/service/protocol.hpp"
#include "netsim/service/server.hpp"

using namespace netsim;
using namespace netsim::service;

namespace {

const std::string kScenarioDir = NETSIM_SCENARIO_DIR;

std::shared_ptr<const Scenario> reference() {
  static auto sc = std::make_shared<const Scenario>(parse_scenario(kScenarioDir + "/reference.toml"));
  return sc;
}

rl::EnvConfig small_env() {
  rl::EnvConfig c;
  c.window_ticks = 8;
  c.max_steps = 4;
  return c;
}

std::string type_of(const std::string& line) { return parse_line(line)["type"].get<std::string>(); }

std::string error_code(const std::string& line) { return decode_error(parse_line(line)).code; }

// Plays the client side of a connection one line at a time.
class ScriptedPeer {
 public:
  explicit ScriptedPeer(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    REQUIRE(::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  }
  ~ScriptedPeer() { ::close(fd_); }

  void send_raw(std::string_view bytes) { REQUIRE(send_all(fd_, bytes)); }
  void send(const std::string& line) { send_raw(line + "\n"); }

  // Next complete line, or nullopt at end of stream.
  std::optional<std::string> read_line() {
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      char chunk[4096];
      ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n <= 0) {
        CHECK(buffer_.empty());  // never a partial line
        return std::nullopt;
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  std::string request(const std::string& line) {
    send(line);
    auto reply = read_line();
    REQUIRE(reply.has_value());
    return *reply;
  }

 private:
  int fd_ = -1;
  std::string buffer_;
};

struct RunningServer {
  explicit RunningServer(rl::EnvConfig env = small_env())
      : server(reference(), [&] {
          ServerConfig c;
          c.env = env;
          return c;
        }()),
        thread([this] { server.run(); }) {}
  ~RunningServer() {
    server.stop();
    thread.join();
  }
  Server server;
  std::thread thread;
};

std::string noop_step() { return encode(StepMessage{rl::noop_action(reference()->sites)}); }

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Header plus data rows, split on commas.
std::vector<std::vector<std::string>> rows_of(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) rows.push_back(csv::split(line));
  return rows;
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("every message type survives encode and decode") {
  CHECK(decode_hello(parse_line(encode(HelloMessage{7}))) == HelloMessage{7});

  ResetMessage reset{18446744073709551615ull, RewardWeights{0.1, 0.2, 0.3, 0.15, 0.25}};
  CHECK(decode_reset(parse_line(encode(reset))) == reset);
  ResetMessage bare{3, std::nullopt};
  CHECK(decode_reset(parse_line(encode(bare))) == bare);

  StateMessage state{{0.1, -0.0, 1e-300, 0.3333333333333333, 123456.789}, 2};
  CHECK(decode_state(parse_line(encode(state))) == state);

  StepMessage step{{{0, 2, -2, 1, true}, {5, 0, 2, -1, false}}};
  CHECK(decode_step(parse_line(encode(step))) == step);

  TransitionMessage t;
  t.state = state;
  t.reward = -0.6999999999999993;
  t.done = true;
  t.kpis = rl::KpiSummary{99.70833333333334, -92.36697686729596, 29.96928972653842, 0.999912357953433, 0.94, 60, false};
  t.clamped = {false, true};
  CHECK(decode_transition(parse_line(encode(t))) == t);

  ErrorMessage e{"version", "unsupported \"2\"\n"};
  CHECK(decode_error(parse_line(encode(e))) == e);
  CHECK(type_of(encode(CloseMessage{})) == "close");
}

TEST_CASE("wire shapes follow protocol v1") {
  CHECK(encode(HelloMessage{}) == R"({"type":"hello","version":1})");
  CHECK(encode(StateMessage{{0.5}, 1}) == R"({"type":"state","vector":[0.5],"n_beams":1})");
  auto j = parse_line(encode(StepMessage{{{1, 1, 0, 0, true}}}));
  CHECK(j["action"]["beams"].size() == 1);
  auto r = parse_line(encode(ResetMessage{4, RewardWeights{}}));
  CHECK(r["seed"] == 4);
  CHECK(r["weights"]["coverage"] == 1.0);
}

TEST_CASE("decoders reject missing and mistyped fields") {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code_of([] { decode_hello(parse_line(R"({"type":"hello"})")); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { decode_reset(parse_line(R"({"type":"reset","seed":-1})")); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { decode_reset(parse_line(R"({"type":"reset","seed":1,"weights":{"speed":1}})")); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { decode_step(parse_line(R"({"type":"step","action":[]})")); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] {
          decode_step(parse_line(R"({"type":"step","action":{"beams":[{"h_index":1,"v_index":1,"azimuth_delta":0,"tilt_delta":0}]}})"));
        }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { parse_line("[1,2]"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { parse_line(R"({"kind":"hello"})"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { parse_line("{\"type\":"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("session answers every line and keeps going after errors") {
  Session s(reference(), small_env());
  CHECK(error_code(s.handle("not json")) == codes::kMalformed);
  CHECK(error_code(s.handle(R"({"type":"reset","seed":1})")) == codes::kHandshake);
  CHECK(error_code(s.handle(R"({"type":"hello","version":2})")) == codes::kVersion);
  CHECK(s.handle(R"({"type":"hello","version":1})") == encode(HelloMessage{}));
  CHECK(error_code(s.handle(R"({"type":"dance"})")) == codes::kUnknownType);
  CHECK(error_code(s.handle(R"({"type":"state","vector":[],"n_beams":0})")) == codes::kUnknownType);
  CHECK(error_code(s.handle(noop_step())) == codes::kNotReset);
  CHECK(type_of(s.handle(R"({"type":"reset","seed":1})")) == "state");
  CHECK(error_code(s.handle(R"({"type":"step","action":{"beams":[]}})")) == codes::kInvalidAction);
  CHECK(error_code(s.handle(R"({"type":"reset","seed":1,"weights":{"coverage":0}})")) == codes::kInvalidArgument);
  for (int i = 0; i < 4; ++i) CHECK(type_of(s.handle(noop_step())) == "transition");
  CHECK(error_code(s.handle(noop_step())) == codes::kEpisodeDone);
  CHECK_FALSE(s.closed());
  CHECK(type_of(s.handle(R"({"type":"close"})" "\r")) == "close");
  CHECK(s.closed());
}

TEST_CASE("scripted peer: hello, reset, three no-op steps, close") {
  RunningServer rs;
  ScriptedPeer peer(rs.server.port());
  CHECK(peer.request(encode(HelloMessage{})) == encode(HelloMessage{}));

  rl::Environment local(reference(), small_env());
  auto expected_state = local.reset(11);
  auto state = decode_state(parse_line(peer.request(encode(ResetMessage{11, std::nullopt}))));
  CHECK(state.vector == expected_state);
  CHECK(state.n_beams == reference()->beam_count());
  CHECK(state.vector.size() == rl::state_length(state.n_beams));

  for (int i = 0; i < 3; ++i) {
    auto line = peer.request(noop_step());
    auto t = decode_transition(parse_line(line));
    CHECK(t.reward == 0.0);
    CHECK_FALSE(t.done);
    auto mine = local.step(rl::noop_action(reference()->sites));
    CHECK(t.state.vector == mine.next_state);
    CHECK(t.kpis == mine.info.kpis);
  }
  CHECK(peer.request(encode(CloseMessage{})) == encode(CloseMessage{}));
  CHECK_FALSE(peer.read_line().has_value());
}

TEST_CASE("version mismatch is an in-band error and the connection stays open") {
  RunningServer rs;
  ScriptedPeer peer(rs.server.port());
  auto reply = peer.request(R"({"type":"hello","version":2})");
  CHECK(error_code(reply) == "version");
  CHECK(peer.request(encode(HelloMessage{})) == encode(HelloMessage{}));
}

TEST_CASE("malformed and fragmented input") {
  RunningServer rs;
  ScriptedPeer peer(rs.server.port());
  CHECK(error_code(peer.request("garbage")) == codes::kMalformed);
  CHECK(error_code(peer.request("")) == codes::kMalformed);
  CHECK(error_code(peer.request("[]")) == codes::kMalformed);
  CHECK(error_code(peer.request(R"({"type":42})")) == codes::kMalformed);

  // A line split across writes is one request; two lines in one write are two.
  peer.send_raw(R"({"type":"hel)");
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  peer.send_raw("lo\",\"version\":1}\n{\"type\":\"nope\"}\n");
  CHECK(peer.read_line() == encode(HelloMessage{}));
  CHECK(error_code(*peer.read_line()) == codes::kUnknownType);

  // The server is still healthy for a full episode.
  CHECK(type_of(peer.request(encode(ResetMessage{2, RewardWeights{0, 1, 0, 0, 0}}))) == "state");
  bool done = false;
  for (int i = 0; i < 4; ++i) done = decode_transition(parse_line(peer.request(noop_step()))).done;
  CHECK(done);
}

TEST_CASE("a peer vanishing mid-line does not take the server down") {
  RunningServer rs;
  {
    ScriptedPeer peer(rs.server.port());
    peer.send_raw(R"({"type":"hello","ver)");
  }
  ScriptedPeer next(rs.server.port());
  CHECK(next.request(encode(HelloMessage{})) == encode(HelloMessage{}));
}

TEST_CASE("concurrent connections run independent episodes") {
  RunningServer rs;
  ScriptedPeer a(rs.server.port()), b(rs.server.port());
  a.request(encode(HelloMessage{}));
  b.request(encode(HelloMessage{}));
  auto sa = decode_state(parse_line(a.request(encode(ResetMessage{1, std::nullopt}))));
  auto sb = decode_state(parse_line(b.request(encode(ResetMessage{2, std::nullopt}))));
  CHECK(sa.vector != sb.vector);

  rl::Environment la(reference(), small_env()), lb(reference(), small_env());
  la.reset(1);
  lb.reset(2);
  auto action = rl::noop_action(reference()->sites);
  action[0].azimuth_delta = 2;
  action[4].tilt_delta = -1;
  for (int i = 0; i < 4; ++i) {
    // Send both before reading either, so the two sessions interleave.
    a.send(encode(StepMessage{action}));
    b.send(noop_step());
    auto ta = decode_transition(parse_line(*a.read_line()));
    auto tb = decode_transition(parse_line(*b.read_line()));
    auto ea = la.step(action);
    auto eb = lb.step(rl::noop_action(reference()->sites));
    CHECK(ta.state.vector == ea.next_state);
    CHECK(ta.reward == ea.reward);
    CHECK(tb.state.vector == eb.next_state);
    CHECK(tb.reward == 0.0);
  }
}

TEST_CASE("simulate is deterministic and its summary is the mean of the grid rows") {
  test::TempDir dir;
  std::string sc = kScenarioDir + "/reference.toml";
  auto r1 = cli({"simulate", "--scenario", sc, "--seed", "5", "--ticks", "10", "--out", dir.file("a")});
  auto r2 = cli({"simulate", "--scenario", sc, "--seed", "5", "--ticks", "10", "--out", dir.file("b")});
  REQUIRE(r1.code == kExitOk);
  REQUIRE(r2.code == kExitOk);
  CHECK(slurp(dir.file("a/kpi.csv")) == slurp(dir.file("b/kpi.csv")));
  CHECK(slurp(dir.file("a/summary.csv")) == slurp(dir.file("b/summary.csv")));

  auto rows = rows_of(slurp(dir.file("a/kpi.csv")));
  std::size_t grid_rows = 0, cell_rows = 0;
  std::vector<double> sums(5, 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][1] == "grid") {
      ++grid_rows;
      for (int k = 0; k < 5; ++k) sums[k] += std::stod(rows[i][2 + k]);
    } else {
      ++cell_rows;
    }
  }
  CHECK(grid_rows == 10);
  CHECK(cell_rows == 10 * reference()->sites.size());
  auto summary = rows_of(slurp(dir.file("a/summary.csv")));
  REQUIRE(summary.size() == 2);
  CHECK(summary[1][0] == "5");
  CHECK(summary[1][1] == "10");
  for (int k = 0; k < 5; ++k) CHECK(std::stod(summary[1][2 + k]) == doctest::Approx(sums[k] / 10).epsilon(1e-12));
}

TEST_CASE("optimize writes a replayable override file") {
  test::TempDir dir;
  std::string sc = kScenarioDir + "/off_boresight_cluster.toml";
  auto opt = cli({"optimize", "--scenario", sc, "--seed", "4", "--algo", "hill", "--budget", "30", "--window", "20",
                  "--out", dir.file("opt")});
  REQUIRE(opt.code == kExitOk);
  auto progress = rows_of(slurp(dir.file("opt/progress.csv")));
  REQUIRE(progress.size() >= 2);
  CHECK(progress.size() <= 31);

  // The best progress row is the configuration written out.
  std::size_t best = 1;
  for (std::size_t i = 2; i < progress.size(); ++i)
    if (std::stod(progress[i][1]) > std::stod(progress[best][1])) best = i;

  auto sim = cli({"simulate", "--scenario", sc, "--seed", "4", "--ticks", "20", "--overrides", dir.file("opt/overrides.toml"),
                  "--out", dir.file("sim")});
  REQUIRE(sim.code == kExitOk);
  auto summary = rows_of(slurp(dir.file("sim/summary.csv")));
  for (int k = 0; k < 5; ++k) CHECK(summary[1][2 + k] == progress[best][2 + k]);

  auto one = cli({"optimize", "--scenario", sc, "--algo", "hill", "--budget", "1", "--window", "5", "--out", dir.file("one")});
  REQUIRE(one.code == kExitOk);
  CHECK(rows_of(slurp(dir.file("one/progress.csv"))).size() == 2);
  auto cem = cli({"optimize", "--scenario", sc, "--algo", "cem", "--budget", "8", "--window", "5", "--out", dir.file("cem")});
  REQUIRE(cem.code == kExitOk);
  CHECK(rows_of(slurp(dir.file("cem/progress.csv"))).size() == 9);
}

TEST_CASE("exit codes") {
  test::TempDir dir;
  std::string sc = kScenarioDir + "/reference.toml";
  CHECK(cli({"optimize", "--scenario", sc, "--algo", "annealing", "--out", dir.file("x")}).code == kExitUsage);
  CHECK(cli({"optimize", "--scenario", sc, "--algo", "cem", "--budget", "3", "--out", dir.file("x")}).code == kExitUsage);
  CHECK(cli({"optimize", "--scenario", sc, "--weights", "1,2", "--out", dir.file("x")}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"simulate", "--scenario", dir.file("missing.toml"), "--out", dir.file("x")}).code == kExitUsage);

  auto missing = dir.file("no_such_model.ckpt");
  auto r = cli({"generate", "--scenario", sc, "--model", missing, "--out", dir.file("g")});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find(missing) != std::string::npos);

  auto help = cli({"--help"});
  CHECK(help.code == kExitOk);
  for (const char* cmd : {"generate", "simulate", "optimize", "train-mobility", "eval-gen", "serve"})
    CHECK(help.out.find(cmd) != std::string::npos);
}

TEST_CASE("generate writes CSVs that read back") {
  test::TempDir dir;
  std::string sc = kScenarioDir + "/reference.toml";
  behavior::VaeHyperParams hp;
  hp.max_steps = 6;
  hp.hidden_dim = 8;
  hp.location_embed = 4;
  hp.latent_dim = 2;
  // 2000 m at 500 m: a 4 x 4 token grid.
  behavior::save_checkpoint(behavior::init_trajectory_model(hp, 16, 3), dir.file("m.ckpt"));

  auto wrong = cli({"generate", "--scenario", sc, "--model", dir.file("m.ckpt"), "--out", dir.file("w")});
  CHECK(wrong.code == kExitUsage);

  auto empty = cli({"generate", "--scenario", sc, "--model", dir.file("m.ckpt"), "--model-resolution", "500", "--n-users",
                    "0", "--out", dir.file("e")});
  REQUIRE(empty.code == kExitOk);
  CHECK(slurp(dir.file("e/waypoints.csv")) == "user_id,t_s,x_m,y_m\n");
  CHECK(behavior::read_session_csv(dir.file("e/sessions.csv")).empty());
  CHECK(rows_of(slurp(dir.file("e/sessions.csv"))).size() == 1);

  auto full = cli({"generate", "--scenario", sc, "--model", dir.file("m.ckpt"), "--model-resolution", "500", "--n-users",
                   "4", "--horizon", "7200", "--seed", "9", "--out", dir.file("f")});
  REQUIRE(full.code == kExitOk);
  auto waypoints = behavior::read_waypoint_csv(dir.file("f/waypoints.csv"));
  CHECK_FALSE(waypoints.empty());
  for (const auto& w : waypoints) {
    CHECK(w.user_id >= 1);
    CHECK(w.user_id <= 4);
    CHECK(reference()->grid.contains(w.position));
  }
  auto sessions = behavior::read_session_csv(dir.file("f/sessions.csv"));
  for (const auto& s : sessions) CHECK(s.start_s < 7200.0);

  auto again = cli({"generate", "--scenario", sc, "--model", dir.file("m.ckpt"), "--model-resolution", "500", "--n-users",
                    "4", "--horizon", "7200", "--seed", "9", "--out", dir.file("g")});
  REQUIRE(again.code == kExitOk);
  CHECK(slurp(dir.file("f/waypoints.csv")) == slurp(dir.file("g/waypoints.csv")));
  CHECK(slurp(dir.file("f/sessions.csv")) == slurp(dir.file("g/sessions.csv")));
}

TEST_CASE("train-mobility and eval-gen on a small commute corpus") {
  test::TempDir dir;
  auto train = cli({"train-mobility", "--synthetic", "--corpus-users", "12", "--corpus-days", "2", "--epochs", "2",
                    "--max-steps", "12", "--hidden", "8", "--out", dir.file("t")});
  REQUIRE(train.code == kExitOk);
  CHECK(rows_of(slurp(dir.file("t/loss.csv"))).size() == 3);
  auto seqs = behavior::read_sequence_csv(dir.file("t/sequences.csv"));
  CHECK(seqs.size() >= 12);

  auto eval = cli({"eval-gen", "--model", dir.file("t/model.ckpt"), "--real", dir.file("t/sequences.csv"), "--synthetic",
                   "--out", dir.file("report.csv")});
  REQUIRE(eval.code == kExitOk);
  auto report = rows_of(slurp(dir.file("report.csv")));
  REQUIRE(report.size() == 3);
  CHECK(report[1][0] == "generated");
  CHECK(report[2][0] == "random_walk");
  for (int r = 1; r <= 2; ++r)
    for (int k = 1; k <= 3; ++k) CHECK(std::isfinite(std::stod(report[r][k])));

  CHECK(cli({"train-mobility", "--out", dir.file("u")}).code == kExitUsage);
}
