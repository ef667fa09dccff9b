// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace irforge {

/// POSIX-shell word splitting without expansion: whitespace separates words,
/// single quotes are literal, inside double quotes a backslash escapes only
/// '"' and '\\', outside quotes a backslash escapes the next character.
/// An unterminated quote raises ErrorKind::Malformed.
std::vector<std::string> shell_split(std::string_view command);

/// Quotes a word so shell_split reproduces it.
std::string shell_quote(std::string_view word);

} // namespace irforge
