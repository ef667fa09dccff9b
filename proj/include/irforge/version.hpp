// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irforge {

/// Dotted numeric version. Missing trailing components compare as zero, so
/// "12.1" == "12.1.0".
class Version {
public:
  static std::optional<Version> parse(std::string_view text);

  const std::vector<long>& components() const noexcept { return parts_; }
  long major() const noexcept { return parts_.empty() ? 0 : parts_[0]; }
  long minor() const noexcept { return parts_.size() < 2 ? 0 : parts_[1]; }
  std::string str() const;

  friend std::strong_ordering operator<=>(const Version& a, const Version& b);
  friend bool operator==(const Version& a, const Version& b) {
    return (a <=> b) == 0;
  }

private:
  std::vector<long> parts_;
};

/// True when `available` satisfies `minimum`. An absent minimum accepts any
/// version; an absent or unparseable available version only satisfies an
/// absent minimum.
bool version_at_least(const std::optional<std::string>& available,
                      const std::optional<std::string>& minimum);

} // namespace irforge
