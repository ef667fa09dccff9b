// SPDX-License-Identifier: Apache-2.0
#include "irforge/version.hpp"

#include <algorithm>
#include <cctype>

namespace irforge {

std::optional<Version> Version::parse(std::string_view text) {
  Version v;
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
    ++i;
  if (i < text.size() && (text[i] == 'v' || text[i] == 'V'))
    ++i;
  while (i < text.size()) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      break;
    long value = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      value = value * 10 + (text[i] - '0');
      ++i;
    }
    v.parts_.push_back(value);
    if (i < text.size() && text[i] == '.')
      ++i;
    else
      break;
  }
  if (v.parts_.empty())
    return std::nullopt;
  return v;
}

std::string Version::str() const {
  std::string out;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i)
      out += '.';
    out += std::to_string(parts_[i]);
  }
  return out;
}

std::strong_ordering operator<=>(const Version& a, const Version& b) {
  const std::size_t n = std::max(a.parts_.size(), b.parts_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const long x = i < a.parts_.size() ? a.parts_[i] : 0;
    const long y = i < b.parts_.size() ? b.parts_[i] : 0;
    if (x != y)
      return x <=> y;
  }
  return std::strong_ordering::equal;
}

bool version_at_least(const std::optional<std::string>& available,
                      const std::optional<std::string>& minimum) {
  if (!minimum)
    return true;
  auto min = Version::parse(*minimum);
  if (!min)
    return true; // free-text minimum such as "latest": nothing to check
  if (!available)
    return false;
  auto have = Version::parse(*available);
  return have && *have >= *min;
}

} // namespace irforge
