// SPDX-License-Identifier: Apache-2.0
#include "irforge/image_tag.hpp"

#include "irforge/error.hpp"

#include <algorithm>
#include <cctype>

namespace irforge {

namespace {

constexpr char kHex[] = "0123456789abcdef";

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool alnum_lower(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

std::string canonical_value(std::string_view v) {
  std::string out;
  for (char c : v)
    out.push_back(c == '_' ? '-' : lower(c));
  return out;
}

std::string canonical_point_name(std::string_view p) {
  std::string out;
  for (char c : p)
    out.push_back(lower(c));
  return out;
}

// Points keep '-' and '_' encoded so the first literal '-' ends the point.
std::string encode(std::string_view text, bool is_value) {
  std::string out;
  for (char c : text) {
    if (alnum_lower(c) || c == '.' || (is_value && c == '-')) {
      out.push_back(c);
    } else {
      const auto b = static_cast<unsigned char>(c);
      out.push_back('%');
      out.push_back(kHex[b >> 4]);
      out.push_back(kHex[b & 0xF]);
    }
  }
  return out;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9')
    return c - '0';
  if (c >= 'a' && c <= 'f')
    return c - 'a' + 10;
  return -1;
}

std::string decode(std::string_view text, std::string_view tag) {
  std::string out;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '%') {
      out.push_back(text[i]);
      continue;
    }
    if (i + 2 >= text.size())
      throw Error(ErrorKind::Malformed, "truncated escape in tag '" + std::string(tag) + "'");
    const int h = hex_digit(text[i + 1]);
    const int l = hex_digit(text[i + 2]);
    if (h < 0 || l < 0)
      throw Error(ErrorKind::Malformed, "bad escape in tag '" + std::string(tag) + "'");
    out.push_back(static_cast<char>(h * 16 + l));
    i += 2;
  }
  return out;
}

} // namespace

PointValues canonical_config(const PointValues& config) {
  PointValues out;
  for (const auto& [p, v] : config)
    out.emplace_back(canonical_point_name(p), canonical_value(v));
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return point_less(a.first, b.first); });
  return out;
}

std::string image_tag(const PointValues& config) {
  if (config.empty())
    return "generic";
  std::string tag;
  for (const auto& [p, v] : canonical_config(config)) {
    if (p.empty())
      throw Error(ErrorKind::Malformed, "configuration has an unnamed point");
    if (!tag.empty())
      tag.push_back('_');
    tag += encode(p, false) + "-" + encode(v, true);
  }
  return tag;
}

std::string image_tag(const ResolvedConfig& resolved) { return image_tag(resolved.pairs()); }

PointValues parse_tag(std::string_view tag) {
  if (tag == "generic")
    return {};
  PointValues out;
  size_t start = 0;
  while (start <= tag.size()) {
    size_t end = tag.find('_', start);
    if (end == std::string_view::npos)
      end = tag.size();
    const std::string_view seg = tag.substr(start, end - start);
    const size_t dash = seg.find('-');
    if (dash == std::string_view::npos)
      throw Error(ErrorKind::Malformed,
                  "tag segment '" + std::string(seg) + "' lacks a point-value separator");
    out.emplace_back(decode(seg.substr(0, dash), tag), decode(seg.substr(dash + 1), tag));
    start = end + 1;
  }
  if (image_tag(out) != tag)
    throw Error(ErrorKind::Malformed, "'" + std::string(tag) + "' is not a canonical tag");
  return out;
}

} // namespace irforge
