// SPDX-License-Identifier: Apache-2.0
#include "irforge/store.hpp"

#include "irforge/digest.hpp"
#include "irforge/error.hpp"
#include "irforge/io.hpp"

namespace irforge {

namespace fs = std::filesystem;

IrStore::IrStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
  const fs::path idx = root_ / "index.json";
  if (fs::exists(idx)) {
    const auto doc = read_json_file(idx);
    index_ = doc.value("keys", std::map<std::string, std::string>{});
  }
}

fs::path IrStore::artifact_path(const std::string& id) const {
  return root_ / id.substr(0, 2) / (id + ".ir");
}

bool IrStore::contains(const std::string& id) const { return fs::exists(artifact_path(id)); }

std::string IrStore::put(std::string_view bytes) {
  const std::string id = sha256_hex(bytes);
  const fs::path path = artifact_path(id);
  if (fs::exists(path)) {
    verify(id);
    return id;
  }
  fs::create_directories(path.parent_path());
  write_file_atomic(path, bytes);
  return id;
}

std::string IrStore::get(const std::string& id) const {
  const fs::path path = artifact_path(id);
  if (!fs::exists(path))
    throw Error(ErrorKind::MissingArtifact, "artifact " + id + " is not in the store");
  std::string bytes = read_file(path);
  if (sha256_hex(bytes) != id)
    throw Error(ErrorKind::StoreCorruption, "stored bytes of " + id + " do not match its id");
  return bytes;
}

void IrStore::verify(const std::string& id) const { (void)get(id); }

std::optional<std::string> IrStore::lookup(const std::string& key_id) const {
  auto it = index_.find(key_id);
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

void IrStore::record(const std::string& key_id, const std::string& artifact_id) {
  index_[key_id] = artifact_id;
}

void IrStore::save_index() const {
  write_file_atomic(root_ / "index.json", dump_json({{"keys", index_}}));
}

} // namespace irforge
