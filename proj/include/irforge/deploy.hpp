// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irforge/buildscan.hpp"
#include "irforge/driver.hpp"
#include "irforge/gpu_compat.hpp"
#include "irforge/image_tag.hpp"
#include "irforge/sysprobe.hpp"
#include "irforge/vector_levels.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace irforge {

struct LowerStep {
  std::string artifact;
  std::string tu_key;
  std::string source;
  std::string output;
  std::string directory;
  Language language = Language::Other;
  std::vector<std::string> residual_flags; // as recorded, with the «ARCH» slot
  std::vector<std::string> arch_flags;     // what the slot resolved to
  std::vector<std::string> flags;          // final lowering flags (placeholder form)
  std::string opt_level;
};

struct SourceCompile {
  std::string source;
  std::string output;
  std::string directory;
  Language language = Language::Other;
  std::vector<std::string> flags;
};

struct DeploymentPlan {
  std::string config;
  PointValues resolved; // the full selection, canonical order
  std::vector<LowerStep> steps;
  std::vector<SourceCompile> sd_compiles;
  nlohmann::json link;
  std::string tag;
  std::optional<CompatVerdict> verdict;
  std::map<std::string, std::string> layers; // deferred layer -> concrete ref
  std::optional<std::string> opt_level_override;
};

struct DeployOptions {
  std::optional<std::string> opt_level; // explicit override, surfaced in the plan
  const VectorLevelTable* levels = nullptr; // defaults to the shipped table
};

/// Picks the recipe configuration whose assignments the selection contains,
/// resolves each «ARCH» slot, checks GPU compatibility and binds deferred
/// layers. Errors: ConfigNotInRecipe, UnsupportedValue, IncompatibleGpu,
/// MissingLayer.
DeploymentPlan plan_deployment(const nlohmann::json& recipe, const PointValues& selection,
                               const SystemFeatureReport& features,
                               const DeployOptions& options = {});

nlohmann::json to_json(const DeploymentPlan& plan);

/// Runs the plan's lowering steps and SD compiles below `build_root`.
void execute_deployment(const DeploymentPlan& plan, const ToolchainDriver& driver,
                        const std::filesystem::path& store,
                        const std::filesystem::path& build_root, unsigned jobs = 1);

} // namespace irforge
