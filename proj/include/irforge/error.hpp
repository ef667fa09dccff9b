// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace irforge {

/// Every domain failure the toolchain can report. The CLI maps any of these
/// to exit status 1; the name is what appears in machine-readable records.
enum class ErrorKind {
  SchemaViolation,
  SyntaxError,
  InvalidLabel,
  ProbeUnavailable,
  MalformedBundle,
  UnknownPoint,
  UnsupportedValue,
  UnresolvedMandatory,
  Malformed,
  AmbiguousEntry,
  DuplicateTarget,
  PreconditionViolated,
  DriverFailure,
  UnknownTargetId,
  StoreCorruption,
  MissingArtifact,
  EmptyConfig,
  EmptyPlan,
  ConfigNotInRecipe,
  IncompatibleGpu,
  MissingLayer,
  EmptyInput,
  Unparseable,
  ProviderError,
  Timeout,
  EmptyAxis,
  InvalidTemplate,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct SchemaViolation {
  std::string path;   // JSON pointer
  std::string reason;

  bool operator==(const SchemaViolation&) const = default;
};

/// Raised with the complete list of violations, not just the first one.
class SchemaError : public Error {
public:
  explicit SchemaError(std::vector<SchemaViolation> violations);

  const std::vector<SchemaViolation>& violations() const noexcept {
    return violations_;
  }

private:
  std::vector<SchemaViolation> violations_;
};

/// A toolchain command exited non-zero. Carries the captured stderr.
class DriverError : public Error {
public:
  DriverError(std::string unit, std::string stderr_text);

  const std::string& unit() const noexcept { return unit_; }
  const std::string& stderr_text() const noexcept { return stderr_; }

private:
  std::string unit_;
  std::string stderr_;
};

class ProviderFailure : public Error {
public:
  ProviderFailure(int status, std::string body);

  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

private:
  int status_;
  std::string body_;
};

} // namespace irforge
