// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irforge/matcher.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace irforge {

using PointValues = std::vector<std::pair<std::string, std::string>>;

/// Canonical form of a point/value list: point names lowercased, values
/// lowercased with '_' folded to '-', sorted in canonical point order.
PointValues canonical_config(const PointValues& config);

/// Deployment image tag: `point-value` segments joined by '_', canonical
/// point order, bytes outside the literal alphabet percent-encoded.
/// An empty configuration yields "generic"; an unnamed point raises
/// ErrorKind::Malformed.
std::string image_tag(const PointValues& config);
std::string image_tag(const ResolvedConfig& resolved);

/// Inverse of image_tag on canonical configurations. Raises
/// ErrorKind::Malformed for strings image_tag cannot produce.
PointValues parse_tag(std::string_view tag);

} // namespace irforge
