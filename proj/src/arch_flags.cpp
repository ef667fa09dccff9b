// SPDX-License-Identifier: Apache-2.0
#include "irforge/arch_flags.hpp"

#include "irforge/assets.hpp"
#include "irforge/io.hpp"
#include "irforge/openmp.hpp"

#include <algorithm>

namespace irforge {

namespace {

struct ArchTable {
  std::vector<std::string> prefixes;
  std::vector<std::string> separate_arg;
  std::vector<std::string> not_arch;
};

const ArchTable& table() {
  static const ArchTable t = [] {
    const auto doc = parse_json(*assets::find("arch_flags.json"), "arch_flags.json");
    return ArchTable{doc.at("prefixes").get<std::vector<std::string>>(),
                     doc.at("separate_arg").get<std::vector<std::string>>(),
                     doc.at("not_arch").get<std::vector<std::string>>()};
  }();
  return t;
}

bool starts_with_any(const std::string& tok, const std::vector<std::string>& list) {
  return std::any_of(list.begin(), list.end(), [&](const std::string& p) {
    // Entries ending in '=' or '-' are prefixes; others match exactly.
    if (!p.empty() && (p.back() == '=' || p.back() == '-'))
      return tok.starts_with(p);
    return tok == p;
  });
}

} // namespace

bool is_arch_flag(const std::string& tok) {
  const ArchTable& t = table();
  if (is_openmp_flag(tok))
    return false;
  for (const auto& p : t.prefixes)
    if (tok.starts_with(p))
      return true;
  if (tok.size() > 2 && tok.starts_with("-m") && !starts_with_any(tok, t.not_arch))
    return true;
  return false;
}

ArchSplit strip_arch_flags(const std::vector<std::string>& flags) {
  const ArchTable& t = table();
  ArchSplit split;
  for (size_t i = 0; i < flags.size(); ++i) {
    const std::string& tok = flags[i];
    const bool separate =
        std::find(t.separate_arg.begin(), t.separate_arg.end(), tok) != t.separate_arg.end();
    if (separate && i + 1 < flags.size()) {
      split.profile.tokens.push_back(tok);
      split.profile.tokens.push_back(flags[++i]);
      continue;
    }
    // Arguments of other separate-argument options (e.g. `-D` `X`) are
    // never mistaken for arch flags.
    if ((tok == "-D" || tok == "-U" || tok == "-Xclang" || tok == "-include" || tok == "-I" ||
         tok == "-isystem" || tok == "-x") &&
        i + 1 < flags.size()) {
      split.residual.push_back(tok);
      split.residual.push_back(flags[++i]);
      continue;
    }
    if (is_arch_flag(tok))
      split.profile.tokens.push_back(tok);
    else
      split.residual.push_back(tok);
  }
  return split;
}

} // namespace irforge
