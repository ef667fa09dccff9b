// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace irforge {

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename, so readers never observe a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Parses JSON text; malformed input raises ErrorKind::SyntaxError naming `what`.
nlohmann::json parse_json(std::string_view text, std::string_view what);
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Stable JSON text: two-space indent, sorted keys, trailing newline.
std::string dump_json(const nlohmann::json& doc);

/// Lexically normal absolute form of `p`, resolved against `base` when relative.
std::filesystem::path absolute_from(const std::filesystem::path& p,
                                    const std::filesystem::path& base);

class TempDir {
public:
  explicit TempDir(std::string_view prefix = "irforge");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
};

} // namespace irforge
