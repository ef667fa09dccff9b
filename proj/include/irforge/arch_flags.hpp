// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace irforge {

/// Architecture-specific codegen flags removed before comparison, in their
/// original order.
struct ArchProfile {
  std::vector<std::string> tokens;
  bool operator==(const ArchProfile&) const = default;
};

struct ArchSplit {
  std::vector<std::string> residual;
  ArchProfile profile;
};

/// Moves CPU-target selection, ISA feature toggles and tuning flags into the
/// profile. Macro definitions always stay in the residual.
ArchSplit strip_arch_flags(const std::vector<std::string>& flags);

bool is_arch_flag(const std::string& token);

} // namespace irforge
