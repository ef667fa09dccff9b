// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irforge/buildscan.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace irforge {

using Matrix = std::map<std::string, std::vector<std::string>>;
using Assignments = std::map<std::string, std::string>;

/// Cartesian product: points in name order, the first point varying
/// slowest, values in listed order. Raises ErrorKind::EmptyAxis.
std::vector<Assignments> expand_matrix(const Matrix& points);

/// Configuration name derived from its assignments (the image tag).
std::string config_name(const Assignments& assignments);

/// {"project", "build_root", "matrix", "db_pattern", "root_pattern"};
/// patterns may contain `{config}`.
struct WorkspaceConfig {
  std::string project;
  std::filesystem::path build_root;
  Matrix matrix;
  std::string db_pattern;
  std::string root_pattern;
};

WorkspaceConfig workspace_from_json(const nlohmann::json& doc,
                                    const std::filesystem::path& base_dir = {});

/// Loads every configuration's compile database and extracts its targets.
std::vector<BuildConfiguration> scan_workspace(const WorkspaceConfig& ws);

BuildConfiguration scan_configuration(const std::string& name, const Assignments& assignments,
                                      const std::filesystem::path& db,
                                      const std::filesystem::path& build_root);

nlohmann::json scan_to_json(const std::string& project,
                            const std::vector<BuildConfiguration>& configs);
std::vector<BuildConfiguration> scan_from_json(const nlohmann::json& doc);

} // namespace irforge
