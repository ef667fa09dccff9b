// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irforge/buildscan.hpp"
#include "irforge/process.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace irforge {

enum class Capability { Preprocess, EmitIr, EmitIrText, Lower, Link };
std::string_view to_string(Capability cap);

/// Token-array command template. `{flags}` must be a whole token and expands
/// to the flag list; `{input}` and `{output}` may be embedded in tokens.
struct CommandTemplate {
  std::vector<std::string> tokens;
  bool operator==(const CommandTemplate&) const = default;
};

/// Toolchain abstraction: one command template per capability plus the set
/// of source languages the toolchain can turn into IR.
class ToolchainDriver {
public:
  /// The clang-based default. `compiler` is the executable name or path.
  static ToolchainDriver builtin_clang(const std::string& compiler = "clang");

  /// `clang`, `clang:/path/to/clang`, or a JSON / flat TOML driver file.
  static ToolchainDriver from_spec(std::string_view spec);
  static ToolchainDriver from_json(const nlohmann::json& doc);

  /// Raises ErrorKind::InvalidTemplate for unknown slots or a malformed
  /// `{flags}` slot.
  void set_template(Capability cap, CommandTemplate tmpl);

  bool has(Capability cap) const { return templates_.contains(cap); }
  bool can_emit_ir(Language lang) const;

  /// Substitutes the slots. A slot left without a value raises
  /// ErrorKind::InvalidTemplate.
  std::vector<std::string> render(Capability cap, const std::vector<std::string>& flags,
                                  const std::optional<std::string>& input,
                                  const std::optional<std::string>& output) const;

  /// Renders and runs; non-zero exit raises DriverError(unit, stderr).
  ProcessResult run(Capability cap, const std::vector<std::string>& flags,
                    const std::string& input, const std::string& output,
                    const std::filesystem::path& cwd, const std::string& unit) const;

  const std::string& name() const { return name_; }
  const std::set<Language>& ir_languages() const { return ir_languages_; }
  nlohmann::json to_json() const;

private:
  std::string name_ = "custom";
  std::map<Capability, CommandTemplate> templates_;
  std::set<Language> ir_languages_;
};

/// Parses the flat TOML subset used by driver files: `key = "text"` and
/// `key = ["a", "b"]` lines, `#` comments.
nlohmann::json parse_flat_toml(std::string_view text);

} // namespace irforge
