// SPDX-License-Identifier: Apache-2.0
//
// Line protocol for driving an environment remotely. Each line is one JSON
// object with a "type" field; every request line gets exactly one response
// line.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "netsim/rl/environment.hpp"

namespace netsim::service {

inline constexpr int kProtocolVersion = 1;

// Error codes carried in {"type":"error"} responses.
namespace codes {
inline constexpr const char* kMalformed = "malformed";
inline constexpr const char* kUnknownType = "unknown_type";
inline constexpr const char* kVersion = "version";
inline constexpr const char* kHandshake = "handshake";
inline constexpr const char* kNotReset = "not_reset";
inline constexpr const char* kEpisodeDone = "episode_done";
inline constexpr const char* kInvalidAction = "invalid_action";
inline constexpr const char* kInvalidArgument = "invalid_argument";
inline constexpr const char* kInternal = "internal";
}  // namespace codes

struct HelloMessage {
  int version = kProtocolVersion;
  friend bool operator==(const HelloMessage&, const HelloMessage&) = default;
};

struct ResetMessage {
  std::uint64_t seed = 0;
  std::optional<RewardWeights> weights;
  friend bool operator==(const ResetMessage&, const ResetMessage&) = default;
};

struct StateMessage {
  std::vector<double> vector;
  std::size_t n_beams = 0;
  friend bool operator==(const StateMessage&, const StateMessage&) = default;
};

struct StepMessage {
  rl::ActionSpec action;
  friend bool operator==(const StepMessage&, const StepMessage&) = default;
};

struct TransitionMessage {
  StateMessage state;
  double reward = 0.0;
  bool done = false;
  rl::KpiSummary kpis;
  std::vector<bool> clamped;
  friend bool operator==(const TransitionMessage&, const TransitionMessage&) = default;
};

struct ErrorMessage {
  std::string code;
  std::string msg;
  friend bool operator==(const ErrorMessage&, const ErrorMessage&) = default;
};

struct CloseMessage {
  friend bool operator==(const CloseMessage&, const CloseMessage&) = default;
};

// Serialized form has no trailing newline.
std::string encode(const HelloMessage& m);
std::string encode(const ResetMessage& m);
std::string encode(const StateMessage& m);
std::string encode(const StepMessage& m);
std::string encode(const TransitionMessage& m);
std::string encode(const ErrorMessage& m);
std::string encode(const CloseMessage& m);

// Decoders take the parsed object and throw InvalidArgument on a missing or
// mistyped field.
HelloMessage decode_hello(const nlohmann::json& j);
ResetMessage decode_reset(const nlohmann::json& j);
StateMessage decode_state(const nlohmann::json& j);
StepMessage decode_step(const nlohmann::json& j);
TransitionMessage decode_transition(const nlohmann::json& j);
ErrorMessage decode_error(const nlohmann::json& j);

// Parses one line into an object carrying a string "type"; InvalidArgument
// otherwise.
nlohmann::json parse_line(std::string_view line);

// Server side of one connection: owns its environment.
class Session {
 public:
  Session(std::shared_ptr<const Scenario> scenario, rl::EnvConfig config);

  // One response line for one request line.
  std::string handle(std::string_view line);
  bool closed() const { return closed_; }

 private:
  std::string on_hello(const nlohmann::json& j);
  std::string on_reset(const nlohmann::json& j);
  std::string on_step(const nlohmann::json& j);

  std::shared_ptr<const Scenario> scenario_;
  rl::EnvConfig config_;
  std::unique_ptr<rl::Environment> env_;
  bool greeted_ = false;
  bool closed_ = false;
};

}  // namespace netsim::service
