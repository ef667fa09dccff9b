// SPDX-License-Identifier: Apache-2.0
#include "irforge/io.hpp"

#include "irforge/error.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

namespace irforge {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(rng());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
      throw Error(ErrorKind::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::Io, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

nlohmann::json parse_json(std::string_view text, std::string_view what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::SyntaxError,
                std::string(what) + ": malformed JSON: " + e.what());
  }
}

nlohmann::json read_json_file(const fs::path& path) {
  return parse_json(read_file(path), path.string());
}

std::string dump_json(const nlohmann::json& doc) {
  return doc.dump(2) + "\n";
}

fs::path absolute_from(const fs::path& p, const fs::path& base) {
  if (p.is_absolute())
    return p.lexically_normal();
  return (base / p).lexically_normal();
}

TempDir::TempDir(std::string_view prefix) {
  std::string pattern =
      (fs::temp_directory_path() / (std::string(prefix) + "-XXXXXX")).string();
  if (!::mkdtemp(pattern.data()))
    throw Error(ErrorKind::Io, "mkdtemp failed for " + pattern);
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

} // namespace irforge
