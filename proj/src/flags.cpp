// SPDX-License-Identifier: Apache-2.0
#include "irforge/flags.hpp"

#include "irforge/error.hpp"

#include <algorithm>
#include <cctype>

namespace irforge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool valid_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

} // namespace

CanonicalFlag normalize_flag(std::string_view input) {
  const std::string_view raw = trim(input);
  if (raw.empty())
    throw Error(ErrorKind::InvalidLabel, "empty flag label");

  CanonicalFlag flag;
  std::string_view body;
  if (raw.starts_with("-D")) {
    body = raw.substr(2);
  } else if (raw.starts_with("-")) {
    flag.raw = std::string(raw);
    return flag;
  } else {
    body = raw;
  }

  const auto eq = body.find('=');
  std::string key(body.substr(0, eq));
  std::replace(key.begin(), key.end(), '-', '_');
  if (key.empty())
    throw Error(ErrorKind::InvalidLabel,
                "flag '" + std::string(raw) + "' has an empty definition key");
  if (!std::all_of(key.begin(), key.end(), valid_key_char))
    throw Error(ErrorKind::InvalidLabel, "flag '" + std::string(raw) +
                                             "' has characters outside [A-Za-z0-9_] in its key");

  flag.definition = true;
  flag.key = key;
  flag.raw = "-D" + key;
  if (eq != std::string_view::npos) {
    flag.value = std::string(body.substr(eq + 1));
    flag.raw += "=" + *flag.value;
  }
  return flag;
}

std::optional<std::string> try_canonical_flag(std::string_view raw) {
  try {
    return normalize_flag(raw).raw;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string fold_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : trim(name)) {
    if (c == '-')
      out.push_back('_');
    else
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

} // namespace irforge
