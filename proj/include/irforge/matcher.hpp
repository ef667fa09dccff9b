// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irforge/catalog.hpp"
#include "irforge/sysprobe.hpp"
#include "irforge/vector_levels.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace irforge {

struct CommonGpuBackend {
  std::optional<std::string> version; // as reported by the system
  std::optional<std::string> flag;
  bool operator==(const CommonGpuBackend&) const = default;
};

/// Catalog options the target system can actually run.
struct CommonSpecialization {
  std::map<std::string, std::optional<std::string>> vectorization_flags;
  std::map<std::string, CommonGpuBackend> gpu_backends;
  std::map<std::string, std::optional<std::string>> parallel;
  std::map<std::string, std::optional<std::string>> libraries;

  // Inputs for resolve(); not part of the serialized intersection.
  std::map<std::string, std::vector<std::string>> point_options; // point -> values
  std::map<std::string, std::string> defaults;                   // point -> catalog default
  bool gpu_mandatory = false;
  std::vector<std::string> warnings;

  bool operator==(const CommonSpecialization&) const = default;
};

CommonSpecialization intersect(const SpecializationCatalog& catalog,
                               const SystemFeatureReport& features,
                               const VectorLevelTable& table = VectorLevelTable::builtin());

/// {"common_specialization": {...}}; empty parallel/libraries maps omitted.
nlohmann::json to_json(const CommonSpecialization& common);

enum class Provenance { User, Operator, Default };
std::string_view to_string(Provenance p);

struct Assignment {
  std::string point;
  std::string value;
  Provenance provenance = Provenance::Default;
  bool operator==(const Assignment&) const = default;
};

/// Chosen value per specialization point, in canonical point order.
struct ResolvedConfig {
  std::vector<Assignment> assignments;

  std::vector<std::pair<std::string, std::string>> pairs() const;
  bool operator==(const ResolvedConfig&) const = default;
};

using Selection = std::map<std::string, std::string>;

/// Resolution precedence: user > operator > catalog default > sole option.
/// Points: gpu, vectorization (alias simd), fft, linear_algebra, and one
/// on/off point per parallel or other library. Operator preferences that do
/// not apply to this system are ignored; user choices must be valid.
ResolvedConfig resolve(const CommonSpecialization& common, const Selection& choices,
                       const std::optional<Selection>& operator_prefs = std::nullopt);

nlohmann::json to_json(const ResolvedConfig& resolved);

/// Canonical point order: gpu, vectorization, parallel models, libraries,
/// other; ties by name.
int point_rank(std::string_view point);
bool point_less(std::string_view a, std::string_view b);

} // namespace irforge
