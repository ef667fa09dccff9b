// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irforge/buildscan.hpp"
#include "irforge/driver.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace irforge {

/// Function-level target attributes (`target-cpu`, `target-features`,
/// `tune-cpu`) the toolchain derives from a set of codegen flags.
using TargetAttributes = std::map<std::string, std::string>;

/// Compiles a one-function probe with `flags` and reads back the target
/// attributes the frontend attaches.
TargetAttributes probe_target_attributes(const ToolchainDriver& driver,
                                         const std::vector<std::string>& flags,
                                         Language language);

/// Rewrites the target attributes of every attribute group that carries
/// them: values replaced, attributes missing from `attrs` removed, absent
/// ones added.
std::string rewrite_target_attributes(std::string_view ir_text, const TargetAttributes& attrs);

/// Lowers a stored IR file to an object under `flags` (concrete paths): the
/// deferred architecture decision is applied by re-targeting function
/// attributes, then the full optimization pipeline runs at the flags' level.
void lower_ir(const ToolchainDriver& driver, const std::filesystem::path& ir,
              const std::vector<std::string>& flags, Language language,
              const std::filesystem::path& object, const std::filesystem::path& cwd,
              const std::string& unit);

} // namespace irforge
