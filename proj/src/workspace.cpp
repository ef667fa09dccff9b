// SPDX-License-Identifier: Apache-2.0
#include "irforge/workspace.hpp"

#include "irforge/error.hpp"
#include "irforge/image_tag.hpp"
#include "irforge/io.hpp"

namespace irforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string substitute(std::string pattern, const std::string& name) {
  const std::string slot = "{config}";
  size_t pos = 0;
  while ((pos = pattern.find(slot, pos)) != std::string::npos) {
    pattern.replace(pos, slot.size(), name);
    pos += name.size();
  }
  return pattern;
}

} // namespace

std::vector<Assignments> expand_matrix(const Matrix& points) {
  std::vector<Assignments> out{Assignments{}};
  for (const auto& [point, values] : points) {
    if (values.empty())
      throw Error(ErrorKind::EmptyAxis, "specialization point '" + point + "' has no values");
    std::vector<Assignments> next;
    for (const auto& partial : out)
      for (const auto& v : values) {
        Assignments a = partial;
        a[point] = v;
        next.push_back(std::move(a));
      }
    out = std::move(next);
  }
  return out;
}

std::string config_name(const Assignments& assignments) {
  return image_tag(PointValues(assignments.begin(), assignments.end()));
}

WorkspaceConfig workspace_from_json(const json& doc, const fs::path& base_dir) {
  try {
    WorkspaceConfig ws;
    ws.project = doc.value("project", std::string("project"));
    ws.build_root = doc.at("build_root").get<std::string>();
    ws.matrix = doc.at("matrix").get<Matrix>();
    const fs::path base = base_dir.empty() ? fs::current_path() : base_dir;
    ws.db_pattern = absolute_from(doc.at("db_pattern").get<std::string>(), base).string();
    ws.root_pattern = doc.contains("root_pattern")
                          ? absolute_from(doc["root_pattern"].get<std::string>(), base).string()
                          : ws.build_root.string();
    return ws;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Malformed, std::string("workspace file: ") + e.what());
  }
}

BuildConfiguration scan_configuration(const std::string& name, const Assignments& assignments,
                                      const fs::path& db, const fs::path& build_root) {
  BuildConfiguration c;
  c.name = name;
  c.assignments = assignments;
  c.build_root = build_root.lexically_normal();
  c.targets = extract_targets(load_compile_db(db), c.build_root);
  return c;
}

std::vector<BuildConfiguration> scan_workspace(const WorkspaceConfig& ws) {
  std::vector<BuildConfiguration> out;
  for (const auto& a : expand_matrix(ws.matrix)) {
    const std::string name = config_name(a);
    out.push_back(scan_configuration(name, a, substitute(ws.db_pattern, name),
                                     substitute(ws.root_pattern, name)));
  }
  return out;
}

json scan_to_json(const std::string& project, const std::vector<BuildConfiguration>& configs) {
  json list = json::array();
  for (const auto& c : configs)
    list.push_back(to_json(c));
  return {{"project", project}, {"configs", list}};
}

std::vector<BuildConfiguration> scan_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("configs") || !doc["configs"].is_array())
    throw Error(ErrorKind::Malformed, "scan document needs a 'configs' array");
  std::vector<BuildConfiguration> out;
  for (const auto& c : doc["configs"])
    out.push_back(configuration_from_json(c));
  return out;
}

} // namespace irforge
