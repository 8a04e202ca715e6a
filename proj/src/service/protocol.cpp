// SPDX-License-Identifier: Apache-2.0
#include "netsim/service/protocol.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "netsim/error.hpp"

namespace netsim::service {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::InvalidArgument, msg); }

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(fmt::format("missing field '{}'", key));
  return *it;
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) bad(fmt::format("field '{}' must be a number", key));
  return v.get<double>();
}

std::int64_t integer(const json& j, const char* key) {
  const json& v = field(j, key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.007199254740992e15)
      return static_cast<std::int64_t>(d);
  }
  bad(fmt::format("field '{}' must be an integer", key));
}

bool boolean(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_boolean()) bad(fmt::format("field '{}' must be a boolean", key));
  return v.get<bool>();
}

void expect_type(const json& j, std::string_view type) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string() || j["type"].get<std::string>() != type)
    bad(fmt::format("expected a '{}' message", type));
}

ojson weights_json(const RewardWeights& w) {
  return ojson{{"coverage", w.coverage}, {"rsrp", w.rsrp}, {"sinr", w.sinr}, {"dl", w.dl}, {"ul", w.ul}};
}

RewardWeights weights_from(const json& j) {
  if (!j.is_object()) bad("'weights' must be an object");
  RewardWeights w{0, 0, 0, 0, 0};
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) bad(fmt::format("weight '{}' must be a number", key));
    double v = value.get<double>();
    if (key == "coverage") w.coverage = v;
    else if (key == "rsrp") w.rsrp = v;
    else if (key == "sinr") w.sinr = v;
    else if (key == "dl") w.dl = v;
    else if (key == "ul") w.ul = v;
    else bad(fmt::format("unknown weight '{}'", key));
  }
  return w;
}

ojson state_json(const StateMessage& m) { return ojson{{"vector", m.vector}, {"n_beams", m.n_beams}}; }

StateMessage state_from(const json& j) {
  if (!j.is_object()) bad("state must be an object");
  StateMessage m;
  const json& v = field(j, "vector");
  if (!v.is_array()) bad("'vector' must be an array");
  m.vector.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) bad("'vector' entries must be numbers");
    m.vector.push_back(x.get<double>());
  }
  auto n = integer(j, "n_beams");
  if (n < 0) bad("'n_beams' must be non-negative");
  m.n_beams = static_cast<std::size_t>(n);
  return m;
}

ojson kpis_json(const rl::KpiSummary& k, const std::vector<bool>& clamped) {
  return ojson{{"coverage_pct", k.coverage_pct}, {"avg_rsrp_dbm", k.avg_rsrp_dbm}, {"avg_sinr_db", k.avg_sinr_db},
              {"dl_mbps", k.dl_mbps},           {"ul_mbps", k.ul_mbps},           {"ticks", k.ticks},
              {"empty", k.empty},               {"clamped", clamped}};
}

ojson beam_json(const rl::BeamAction& a) {
  return ojson{{"h_index", a.h_index},
              {"v_index", a.v_index},
              {"azimuth_delta", a.azimuth_delta},
              {"tilt_delta", a.tilt_delta},
              {"active", a.active}};
}

rl::BeamAction beam_from(const json& j) {
  if (!j.is_object()) bad("beam actions must be objects");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "h_index" && key != "v_index" && key != "azimuth_delta" && key != "tilt_delta" && key != "active")
      bad(fmt::format("unknown beam action field '{}'", key));
  }
  auto narrow = [](std::int64_t v, const char* key) {
    if (v < -1000000 || v > 1000000) bad(fmt::format("field '{}' out of range", key));
    return static_cast<int>(v);
  };
  rl::BeamAction a;
  a.h_index = narrow(integer(j, "h_index"), "h_index");
  a.v_index = narrow(integer(j, "v_index"), "v_index");
  a.azimuth_delta = narrow(integer(j, "azimuth_delta"), "azimuth_delta");
  a.tilt_delta = narrow(integer(j, "tilt_delta"), "tilt_delta");
  a.active = boolean(j, "active");
  return a;
}

std::string error_line(const char* code, const std::string& msg) { return encode(ErrorMessage{code, msg}); }

}  // namespace

std::string encode(const HelloMessage& m) { return ojson{{"type", "hello"}, {"version", m.version}}.dump(); }

std::string encode(const ResetMessage& m) {
  ojson j{{"type", "reset"}, {"seed", m.seed}};
  if (m.weights) j["weights"] = weights_json(*m.weights);
  return j.dump();
}

std::string encode(const StateMessage& m) {
  return ojson{{"type", "state"}, {"vector", m.vector}, {"n_beams", m.n_beams}}.dump();
}

std::string encode(const StepMessage& m) {
  ojson beams = ojson::array();
  for (const auto& a : m.action) beams.push_back(beam_json(a));
  return ojson{{"type", "step"}, {"action", {{"beams", beams}}}}.dump();
}

std::string encode(const TransitionMessage& m) {
  return ojson{{"type", "transition"},
              {"state", state_json(m.state)},
              {"reward", m.reward},
              {"done", m.done},
              {"kpis", kpis_json(m.kpis, m.clamped)}}
      .dump();
}

std::string encode(const ErrorMessage& m) {
  // Replacement keeps the line valid UTF-8 whatever the message contains.
  return ojson{{"type", "error"}, {"code", m.code}, {"msg", m.msg}}.dump(-1, ' ', false,
                                                                         ojson::error_handler_t::replace);
}

std::string encode(const CloseMessage&) { return ojson{{"type", "close"}}.dump(); }

HelloMessage decode_hello(const json& j) {
  expect_type(j, "hello");
  auto v = integer(j, "version");
  if (v < -1000000 || v > 1000000) bad("'version' out of range");
  return HelloMessage{static_cast<int>(v)};
}

ResetMessage decode_reset(const json& j) {
  expect_type(j, "reset");
  ResetMessage m;
  const json& s = field(j, "seed");
  if (s.is_number_unsigned()) {
    m.seed = s.get<std::uint64_t>();
  } else {
    auto v = integer(j, "seed");
    if (v < 0) bad("'seed' must be non-negative");
    m.seed = static_cast<std::uint64_t>(v);
  }
  if (auto it = j.find("weights"); it != j.end() && !it->is_null()) m.weights = weights_from(*it);
  return m;
}

StateMessage decode_state(const json& j) {
  expect_type(j, "state");
  return state_from(j);
}

StepMessage decode_step(const json& j) {
  expect_type(j, "step");
  const json& action = field(j, "action");
  if (!action.is_object()) bad("'action' must be an object");
  const json& beams = field(action, "beams");
  if (!beams.is_array()) bad("'action.beams' must be an array");
  StepMessage m;
  for (const auto& b : beams) m.action.push_back(beam_from(b));
  return m;
}

TransitionMessage decode_transition(const json& j) {
  expect_type(j, "transition");
  TransitionMessage m;
  m.state = state_from(field(j, "state"));
  m.reward = number(j, "reward");
  m.done = boolean(j, "done");
  const json& k = field(j, "kpis");
  if (!k.is_object()) bad("'kpis' must be an object");
  m.kpis.coverage_pct = number(k, "coverage_pct");
  m.kpis.avg_rsrp_dbm = number(k, "avg_rsrp_dbm");
  m.kpis.avg_sinr_db = number(k, "avg_sinr_db");
  m.kpis.dl_mbps = number(k, "dl_mbps");
  m.kpis.ul_mbps = number(k, "ul_mbps");
  auto ticks = integer(k, "ticks");
  if (ticks < 0) bad("'ticks' must be non-negative");
  m.kpis.ticks = static_cast<std::size_t>(ticks);
  m.kpis.empty = boolean(k, "empty");
  const json& c = field(k, "clamped");
  if (!c.is_array()) bad("'clamped' must be an array");
  for (const auto& x : c) {
    if (!x.is_boolean()) bad("'clamped' entries must be booleans");
    m.clamped.push_back(x.get<bool>());
  }
  return m;
}

ErrorMessage decode_error(const json& j) {
  expect_type(j, "error");
  const json& code = field(j, "code");
  const json& msg = field(j, "msg");
  if (!code.is_string() || !msg.is_string()) bad("'code' and 'msg' must be strings");
  return ErrorMessage{code.get<std::string>(), msg.get<std::string>()};
}

json parse_line(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) bad("line is not valid JSON");
  if (!j.is_object()) bad("message must be a JSON object");
  if (!j.contains("type") || !j["type"].is_string()) bad("message needs a string 'type'");
  return j;
}

Session::Session(std::shared_ptr<const Scenario> scenario, rl::EnvConfig config)
    : scenario_(std::move(scenario)), config_(config) {}

std::string Session::handle(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  json j;
  try {
    j = parse_line(line);
  } catch (const Error& e) {
    return error_line(codes::kMalformed, e.what());
  }
  const std::string type = j["type"].get<std::string>();
  try {
    if (type == "hello") return on_hello(j);
    if (type == "close") {
      closed_ = true;
      return encode(CloseMessage{});
    }
    if (type == "reset" || type == "step") {
      if (!greeted_) return error_line(codes::kHandshake, "send hello first");
      return type == "reset" ? on_reset(j) : on_step(j);
    }
    return error_line(codes::kUnknownType, fmt::format("unknown message type '{}'", type));
  } catch (const std::exception& e) {
    return error_line(codes::kInternal, e.what());
  }
}

std::string Session::on_hello(const json& j) {
  HelloMessage m;
  try {
    m = decode_hello(j);
  } catch (const Error& e) {
    return error_line(codes::kMalformed, e.what());
  }
  if (m.version != kProtocolVersion)
    return error_line(codes::kVersion,
                      fmt::format("protocol version {} is not supported (server speaks {})", m.version,
                                  kProtocolVersion));
  greeted_ = true;
  return encode(HelloMessage{});
}

std::string Session::on_reset(const json& j) {
  ResetMessage m;
  try {
    m = decode_reset(j);
  } catch (const Error& e) {
    return error_line(codes::kMalformed, e.what());
  }
  if (!env_) env_ = std::make_unique<rl::Environment>(scenario_, config_);
  try {
    auto state = env_->reset(m.seed, m.weights);
    return encode(StateMessage{std::move(state), env_->n_beams()});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) return error_line(codes::kInvalidArgument, e.what());
    throw;
  }
}

std::string Session::on_step(const json& j) {
  StepMessage m;
  try {
    m = decode_step(j);
  } catch (const Error& e) {
    return error_line(codes::kMalformed, e.what());
  }
  if (!env_ || !env_->is_reset()) return error_line(codes::kNotReset, "send reset before step");
  try {
    auto t = env_->step(m.action);
    TransitionMessage out;
    out.state = StateMessage{std::move(t.next_state), env_->n_beams()};
    out.reward = t.reward;
    out.done = t.done;
    out.kpis = t.info.kpis;
    out.clamped = std::move(t.info.clamped);
    return encode(out);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EpisodeDone) return error_line(codes::kEpisodeDone, e.what());
    if (e.code() == ErrorCode::NotReset) return error_line(codes::kNotReset, e.what());
    if (e.code() == ErrorCode::InvalidArgument) return error_line(codes::kInvalidAction, e.what());
    throw;
  }
}

}  // namespace netsim::service
