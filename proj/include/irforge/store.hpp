// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace irforge {

/// Content-addressed IR store: `<root>/<2-char prefix>/<sha256>.ir` plus an
/// `index.json` mapping TU key ids to artifact ids.
class IrStore {
public:
  explicit IrStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path artifact_path(const std::string& id) const;
  bool contains(const std::string& id) const;

  /// Stores bytes under their digest (temp file + rename); returns the id.
  std::string put(std::string_view bytes);
  /// Reads and verifies an artifact; raises ErrorKind::StoreCorruption on a
  /// digest mismatch and ErrorKind::MissingArtifact when absent.
  std::string get(const std::string& id) const;
  void verify(const std::string& id) const;

  std::optional<std::string> lookup(const std::string& key_id) const;
  void record(const std::string& key_id, const std::string& artifact_id);
  void save_index() const;

private:
  std::filesystem::path root_;
  std::map<std::string, std::string> index_;
};

} // namespace irforge
