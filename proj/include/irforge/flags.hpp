// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace irforge {

/// A build flag in canonical spelling. Definition-style flags (`-DKEY[=VALUE]`)
/// carry their key; other options (`-O3`, `-fopenmp`) pass through verbatim
/// with `definition == false`.
struct CanonicalFlag {
  std::string raw;
  std::string key;
  std::optional<std::string> value;
  bool definition = false;

  bool operator==(const CanonicalFlag&) const = default;
};

/// Canonicalizes a build-flag label: adds a missing `-D` to bare labels,
/// turns hyphens inside the key into underscores, keeps `=value` verbatim.
/// Keys may contain only letters, digits and underscores; anything else is
/// rejected with ErrorKind::InvalidLabel rather than silently mapped.
CanonicalFlag normalize_flag(std::string_view raw);

/// Non-throwing variant: the canonical spelling, or nullopt for labels
/// normalize_flag would reject.
std::optional<std::string> try_canonical_flag(std::string_view raw);

/// Lowercase, hyphens folded to underscores. Used to compare names whose
/// spelling drifts between sources ("thread-MPI" vs "thread_mpi").
std::string fold_name(std::string_view name);

} // namespace irforge
