// SPDX-License-Identifier: Apache-2.0
#include "irforge/error.hpp"

namespace irforge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::SchemaViolation: return "SchemaViolation";
  case ErrorKind::SyntaxError: return "SyntaxError";
  case ErrorKind::InvalidLabel: return "InvalidLabel";
  case ErrorKind::ProbeUnavailable: return "ProbeUnavailable";
  case ErrorKind::MalformedBundle: return "MalformedBundle";
  case ErrorKind::UnknownPoint: return "UnknownPoint";
  case ErrorKind::UnsupportedValue: return "UnsupportedValue";
  case ErrorKind::UnresolvedMandatory: return "UnresolvedMandatory";
  case ErrorKind::Malformed: return "Malformed";
  case ErrorKind::AmbiguousEntry: return "AmbiguousEntry";
  case ErrorKind::DuplicateTarget: return "DuplicateTarget";
  case ErrorKind::PreconditionViolated: return "PreconditionViolated";
  case ErrorKind::DriverFailure: return "DriverFailure";
  case ErrorKind::UnknownTargetId: return "UnknownTargetId";
  case ErrorKind::StoreCorruption: return "StoreCorruption";
  case ErrorKind::MissingArtifact: return "MissingArtifact";
  case ErrorKind::EmptyConfig: return "EmptyConfig";
  case ErrorKind::EmptyPlan: return "EmptyPlan";
  case ErrorKind::ConfigNotInRecipe: return "ConfigNotInRecipe";
  case ErrorKind::IncompatibleGpu: return "IncompatibleGpu";
  case ErrorKind::MissingLayer: return "MissingLayer";
  case ErrorKind::EmptyInput: return "EmptyInput";
  case ErrorKind::Unparseable: return "Unparseable";
  case ErrorKind::ProviderError: return "ProviderError";
  case ErrorKind::Timeout: return "Timeout";
  case ErrorKind::EmptyAxis: return "EmptyAxis";
  case ErrorKind::InvalidTemplate: return "InvalidTemplate";
  case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string summarize(const std::vector<SchemaViolation>& violations) {
  std::string out = std::to_string(violations.size()) + " schema violation(s)";
  for (const auto& v : violations)
    out += "; " + v.path + ": " + v.reason;
  return out;
}

} // namespace

SchemaError::SchemaError(std::vector<SchemaViolation> violations)
    : Error(ErrorKind::SchemaViolation, summarize(violations)),
      violations_(std::move(violations)) {}

DriverError::DriverError(std::string unit, std::string stderr_text)
    : Error(ErrorKind::DriverFailure,
            "toolchain failed on " + unit + ": " + stderr_text),
      unit_(std::move(unit)), stderr_(std::move(stderr_text)) {}

ProviderFailure::ProviderFailure(int status, std::string body)
    : Error(ErrorKind::ProviderError,
            "provider returned HTTP " + std::to_string(status) + ": " + body),
      status_(status), body_(std::move(body)) {}

} // namespace irforge
