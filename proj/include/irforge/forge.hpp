// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irforge/dedup.hpp"
#include "irforge/driver.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace irforge {

/// Placeholder for the architecture flags chosen at deployment.
inline constexpr std::string_view kArchPlaceholder = "\xC2\xAB" "ARCH" "\xC2\xBB";

struct IRArtifact {
  std::string id;     // digest of the IR bytes
  std::string key_id; // TUKey id
  TUKey tu_key;
  std::filesystem::path path;
  std::vector<std::string> emission_flags;
  bool cache_hit = false;
};

struct EmitStats {
  size_t emitted = 0;
  size_t cache_hits = 0;
};

/// Emits one IR artifact per distinct key of the plan into the store.
/// Keys already recorded in the store index are reused after verification.
std::vector<IRArtifact> emit_ir_set(const DedupPlan& plan, const ToolchainDriver& driver,
                                    const std::filesystem::path& store, unsigned jobs = 1,
                                    EmitStats* stats = nullptr);

/// Per-configuration installation manifest (JSON). Raises
/// ErrorKind::MissingArtifact or ErrorKind::EmptyConfig.
nlohmann::json render_install_manifest(const std::string& config, const DedupPlan& plan,
                                       const std::vector<IRArtifact>& artifacts);

struct ContainerRecipe {
  nlohmann::json doc;     // machine-readable recipe, manifests embedded
  std::string dockerfile; // container build file text
};

/// `bases`: {"toolchain": ref, "deferred": {backend: ref-template},
/// "gpu": {...}, "source_tree": path}. Raises ErrorKind::EmptyPlan.
ContainerRecipe render_container_recipe(const DedupPlan& plan,
                                        const std::vector<nlohmann::json>& manifests,
                                        const nlohmann::json& bases);

/// True when the assignment value selects an actual GPU backend.
bool is_gpu_assignment(const std::string& point, const std::string& value);

/// Source scan for build-time CUDA runtime version checks.
bool uses_runtime_version_macro(std::string_view source_text);

} // namespace irforge
