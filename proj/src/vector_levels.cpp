// SPDX-License-Identifier: Apache-2.0
#include "irforge/vector_levels.hpp"

#include "irforge/assets.hpp"
#include "irforge/io.hpp"

#include <algorithm>
#include <cctype>

namespace irforge {

std::string fold_level(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '-' || c == '.')
      out.push_back('_');
    else
      out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

const VectorLevelTable& VectorLevelTable::builtin() {
  static const VectorLevelTable table =
      from_json(parse_json(*assets::find("vector_levels.json"), "vector_levels.json"));
  return table;
}

VectorLevelTable VectorLevelTable::from_json(const nlohmann::json& doc) {
  VectorLevelTable table;
  for (const auto& [name, entry] : doc.at("levels").items()) {
    VectorLevel level;
    level.name = name;
    level.requires_features = entry.value("requires", std::vector<std::string>{});
    level.codegen_flags = entry.value("codegen_flags", std::vector<std::string>{});
    level.fallback = entry.value("fallback", false);
    table.by_fold_[fold_level(name)] = std::move(level);
  }
  return table;
}

const VectorLevel* VectorLevelTable::find(std::string_view name) const {
  auto it = by_fold_.find(fold_level(name));
  return it == by_fold_.end() ? nullptr : &it->second;
}

bool VectorLevelTable::supported(const VectorLevel& level,
                                 const std::set<std::string>& features) {
  return std::all_of(level.requires_features.begin(), level.requires_features.end(),
                     [&](const std::string& f) { return features.contains(f); });
}

} // namespace irforge
