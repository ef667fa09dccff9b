// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irforge {

/// Stands in for the configured build root in every canonical token, so
/// builds located in different directories compare equal.
inline constexpr std::string_view kBuildPlaceholder = "\xC2\xAB" "BUILD" "\xC2\xBB";

struct CompileCommand {
  std::filesystem::path directory;
  std::filesystem::path file; // absolute
  std::optional<std::filesystem::path> output;
  std::vector<std::string> arguments;
  bool operator==(const CompileCommand&) const = default;
};

enum class Language { C, Cxx, Cuda, Other };
std::string_view to_string(Language lang);
Language language_from_string(std::string_view name);

/// Classifies by extension; an explicit `-x LANG` in `args` overrides it.
Language detect_language(const std::filesystem::path& source,
                         const std::vector<std::string>& args = {});

struct TargetId {
  std::string source; // canonical (placeholder-rewritten) path
  std::string output;
  std::string str() const { return source + " -> " + output; }
  auto operator<=>(const TargetId&) const = default;
};

struct CompilationTarget {
  TargetId id;
  std::vector<std::string> flags; // canonical FlagSet
  Language language = Language::Other;
  std::string directory; // canonical working directory
  bool operator==(const CompilationTarget&) const = default;
};

struct BuildConfiguration {
  std::string name;
  std::map<std::string, std::string> assignments;
  std::filesystem::path build_root; // where this configuration really lives
  std::vector<CompilationTarget> targets;

  size_t target_count() const { return targets.size(); }
};

/// Reads a compile-command database. Raises ErrorKind::Malformed (with the
/// entry index), ErrorKind::AmbiguousEntry, or ErrorKind::SyntaxError.
std::vector<CompileCommand> load_compile_db(const std::filesystem::path& path);
std::vector<CompileCommand> parse_compile_db(const nlohmann::json& doc);

/// Rewrites `path` to the placeholder form when it lies under `root`.
std::string rewrite_root(std::string_view token, const std::filesystem::path& root);
/// Inverse of rewrite_root for a concrete root.
std::string expand_root(std::string_view token, const std::filesystem::path& root);

/// Drops the driver, source and output tokens; makes relative include paths
/// absolute against `directory` (when given) and replaces the build root by
/// the placeholder.
std::vector<std::string> canonicalize_flags(const std::vector<std::string>& args,
                                            const std::filesystem::path& build_root,
                                            const std::filesystem::path& directory = {},
                                            const std::filesystem::path& source = {});

/// One target per (source, output) pair. Exact duplicates collapse;
/// conflicting duplicates raise ErrorKind::DuplicateTarget.
std::vector<CompilationTarget> extract_targets(const std::vector<CompileCommand>& db,
                                               const std::filesystem::path& build_root);

nlohmann::json to_json(const BuildConfiguration& config);
BuildConfiguration configuration_from_json(const nlohmann::json& doc);

/// Options taking a separate argument token.
bool takes_separate_argument(std::string_view flag);

} // namespace irforge
