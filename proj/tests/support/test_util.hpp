// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irforge/error.hpp"
#include "irforge/io.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace irforge::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(IRFORGE_FIXTURES) / name;
}

inline const std::string& clang_path() {
  static const std::string path = IRFORGE_TEST_CLANG;
  return path;
}

inline bool have_clang() { return !clang_path().empty(); }

/// Runs `fn` and returns the ErrorKind it raised, or nullopt.
template <class Fn>
std::optional<ErrorKind> error_kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

} // namespace irforge::testing
