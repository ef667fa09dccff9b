// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace irforge {

bool is_openmp_flag(std::string_view token);

/// True when preprocessed text contains an OpenMP pragma or calls an OpenMP
/// runtime routine.
bool classify_openmp(std::string_view preprocessed_text);

/// Flags with every OpenMP enable flag removed.
std::vector<std::string> without_openmp(const std::vector<std::string>& flags);

/// Decides whether two targets with equal preprocessed digests may share
/// IR although one enables OpenMP. Raises ErrorKind::PreconditionViolated
/// when the flag sets differ by more than OpenMP enable flags.
bool normalize_openmp(const std::vector<std::string>& flags_a,
                      const std::vector<std::string>& flags_b,
                      std::string_view preprocessed_text);

} // namespace irforge
