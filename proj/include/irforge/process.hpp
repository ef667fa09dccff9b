// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace irforge {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs argv[0] (looked up on PATH) without a shell. stdout and stderr are
/// captured. Raises ErrorKind::Io if the process cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd = {});

/// Absolute path of `program` on PATH, or empty.
std::filesystem::path find_program(const std::string& program);

} // namespace irforge
