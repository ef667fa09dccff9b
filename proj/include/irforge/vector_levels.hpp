// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace irforge {

/// One vectorization level: the CPU feature tokens it needs and the codegen
/// flags that select it at lowering time.
struct VectorLevel {
  std::string name;
  std::vector<std::string> requires_features;
  std::vector<std::string> codegen_flags;
  bool fallback = false; // no hardware requirement (None, Reference, ...)
};

/// Level-name fold used for table lookups: uppercase, '-' and '.' -> '_'.
std::string fold_level(std::string_view name);

class VectorLevelTable {
public:
  /// The table shipped with the tool.
  static const VectorLevelTable& builtin();
  static VectorLevelTable from_json(const nlohmann::json& doc);

  /// nullptr for levels unknown to the table.
  const VectorLevel* find(std::string_view name) const;
  static bool supported(const VectorLevel& level, const std::set<std::string>& features);

private:
  std::map<std::string, VectorLevel> by_fold_;
};

} // namespace irforge
