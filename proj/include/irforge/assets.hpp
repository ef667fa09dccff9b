// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>

namespace irforge::assets {

/// Data files from data/ compiled into the binary, looked up by file name.
std::optional<std::string_view> find(std::string_view name);

} // namespace irforge::assets
