// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irforge {

// Field names follow the catalog schema; optional text fields treat an
// explicit JSON null and an absent key the same way.

struct GpuBuild {
  bool value = false;
  std::optional<std::string> build_flag;
  bool operator==(const GpuBuild&) const = default;
};

/// Entry shape shared by gpu_backends and parallel_programming_libraries.
struct VersionedOption {
  bool used_as_default = false;
  std::optional<std::string> build_flag;
  std::optional<std::string> minimum_version;
  bool operator==(const VersionedOption&) const = default;
};

struct LinearAlgebraOption {
  bool used_as_default = false;
  std::optional<std::string> build_flag;
  std::optional<std::string> condition;
  bool operator==(const LinearAlgebraOption&) const = default;
};

struct FftOption {
  std::optional<bool> built_in;
  bool used_as_default = false;
  std::optional<std::string> dependencies;
  std::optional<std::string> build_flag;
  std::optional<std::string> condition; // required by the schema, type unconstrained
  bool operator==(const FftOption&) const = default;
};

struct ExternalLibrary {
  std::string version;
  bool used_as_default = false;
  std::string conditions;
  std::optional<std::string> build_flag;
  bool operator==(const ExternalLibrary&) const = default;
};

struct CompilerRequirement {
  std::string minimum_version;
  bool operator==(const CompilerRequirement&) const = default;
};

struct SimdLevel {
  std::optional<std::string> build_flag;
  bool is_default = false;
  bool operator==(const SimdLevel&) const = default;
};

struct BuildSystem {
  std::string type = "undetermined"; // cmake | make | undetermined
  std::string minimum_version;
  bool operator==(const BuildSystem&) const = default;
};

struct InternalBuild {
  std::string library_name;
  std::optional<std::string> build_flag;
  bool operator==(const InternalBuild&) const = default;
};

/// An application's build-time option space.
struct SpecializationCatalog {
  std::optional<GpuBuild> gpu_build;
  std::map<std::string, VersionedOption> gpu_backends;
  std::map<std::string, VersionedOption> parallel_programming_libraries;
  std::map<std::string, LinearAlgebraOption> linear_algebra_libraries;
  std::map<std::string, FftOption> fft_libraries;
  std::map<std::string, ExternalLibrary> other_external_libraries;
  std::vector<std::string> compiler_flags;
  std::vector<std::string> optimization_build_flags;
  std::map<std::string, CompilerRequirement> compilers;
  std::vector<std::string> architectures;
  std::map<std::string, SimdLevel> simd_vectorization;
  BuildSystem build_system;
  InternalBuild internal_build;

  /// Non-fatal findings from ingest: flags that could not be canonicalized,
  /// duplicate defaults in exclusive categories, empty map keys.
  std::vector<std::string> diagnostics;

  bool operator==(const SpecializationCatalog&) const = default;
};

struct CatalogOptions {
  bool normalize_flags = true;
};

/// Parses and validates a catalog document. Malformed JSON raises
/// ErrorKind::SyntaxError; any schema violation raises SchemaError with the
/// full violation list. Acceptance depends on the schema alone.
SpecializationCatalog validate_catalog(std::string_view document,
                                       CatalogOptions options = {});
SpecializationCatalog validate_catalog(const nlohmann::json& document,
                                       CatalogOptions options = {});
inline SpecializationCatalog validate_catalog(const std::string& document,
                                              CatalogOptions options = {}) {
  return validate_catalog(std::string_view(document), options);
}

/// Schema-conforming document for `catalog`.
nlohmann::json to_json(const SpecializationCatalog& catalog);

} // namespace irforge
