// SPDX-License-Identifier: Apache-2.0
#include "netsim/error.hpp"

namespace netsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MalformedSyntax: return "MalformedSyntax";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::GraphNotRecorded: return "GraphNotRecorded";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::BadRow: return "BadRow";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::TooFewSequences: return "TooFewSequences";
    case ErrorCode::InvalidCheckpoint: return "InvalidCheckpoint";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::MismatchedApps: return "MismatchedApps";
    case ErrorCode::UnknownLink: return "UnknownLink";
    case ErrorCode::NoActiveBeam: return "NoActiveBeam";
    case ErrorCode::UnknownBeam: return "UnknownBeam";
    case ErrorCode::InvalidOverride: return "InvalidOverride";
    case ErrorCode::EpisodeFinished: return "EpisodeFinished";
    case ErrorCode::NotReset: return "NotReset";
    case ErrorCode::EpisodeDone: return "EpisodeDone";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace netsim
