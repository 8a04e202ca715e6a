// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netsim {

enum class ErrorCode {
  MissingField,
  OutOfRange,
  MalformedSyntax,
  UnknownKey,
  OutOfBounds,
  ShapeMismatch,
  EmptySequence,
  NonFinite,
  GraphNotRecorded,
  SchemaMismatch,
  BadRow,
  EmptyInput,
  Diverged,
  TooFewSequences,
  InvalidCheckpoint,
  TooFewPoints,
  MismatchedApps,
  UnknownLink,
  NoActiveBeam,
  UnknownBeam,
  InvalidOverride,
  EpisodeFinished,
  NotReset,
  EpisodeDone,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace netsim
