// SPDX-License-Identifier: Apache-2.0
#include "irforge/openmp.hpp"

#include "irforge/assets.hpp"
#include "irforge/error.hpp"
#include "irforge/io.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace irforge {

namespace {

struct OpenMpTable {
  std::vector<std::string> enable_flags;
  std::vector<std::string> api_prefixes;
};

const OpenMpTable& table() {
  static const OpenMpTable t = [] {
    const auto doc = parse_json(*assets::find("openmp.json"), "openmp.json");
    return OpenMpTable{doc.at("enable_flags").get<std::vector<std::string>>(),
                       doc.at("api_prefixes").get<std::vector<std::string>>()};
  }();
  return t;
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

} // namespace

bool is_openmp_flag(std::string_view token) {
  const auto& f = table().enable_flags;
  return std::find(f.begin(), f.end(), token) != f.end();
}

bool classify_openmp(std::string_view text) {
  static const std::regex pragma(R"(#[ \t]*pragma[ \t]+omp\b)");
  static const std::regex operator_pragma(R"(_Pragma[ \t]*\([ \t]*"[ \t]*omp\b)");
  const std::string s(text);
  if (std::regex_search(s, pragma) || std::regex_search(s, operator_pragma))
    return true;
  for (const auto& prefix : table().api_prefixes) {
    size_t pos = 0;
    while ((pos = s.find(prefix, pos)) != std::string::npos) {
      const size_t start = pos;
      pos += prefix.size();
      if (start > 0 && ident_char(s[start - 1]))
        continue;
      size_t end = pos;
      while (end < s.size() && ident_char(s[end]))
        ++end;
      if (end == pos)
        continue;
      size_t k = end;
      while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k])))
        ++k;
      if (k < s.size() && s[k] == '(')
        return true;
    }
  }
  return false;
}

std::vector<std::string> without_openmp(const std::vector<std::string>& flags) {
  std::vector<std::string> out;
  std::copy_if(flags.begin(), flags.end(), std::back_inserter(out),
               [](const std::string& f) { return !is_openmp_flag(f); });
  return out;
}

bool normalize_openmp(const std::vector<std::string>& flags_a,
                      const std::vector<std::string>& flags_b,
                      std::string_view preprocessed_text) {
  if (without_openmp(flags_a) != without_openmp(flags_b))
    throw Error(ErrorKind::PreconditionViolated,
                "flag sets differ by more than the OpenMP enable flag");
  return !classify_openmp(preprocessed_text);
}

} // namespace irforge
