// SPDX-License-Identifier: Apache-2.0
#include "irforge/gpu_compat.hpp"

#include "irforge/version.hpp"

#include <algorithm>
#include <cctype>

namespace irforge {

std::string ComputeCapability::str() const {
  return "sm_" + std::to_string(major) + std::to_string(minor);
}

std::optional<ComputeCapability> parse_capability(std::string_view text) {
  for (std::string_view prefix : {"sm_", "compute_"})
    if (text.starts_with(prefix))
      text.remove_prefix(prefix.size());
  if (text.empty())
    return std::nullopt;
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    auto v = Version::parse(text);
    if (!v || v->components().size() != 2)
      return std::nullopt;
    return ComputeCapability{static_cast<int>(v->major()), static_cast<int>(v->minor())};
  }
  // Architecture suffixes such as "90a" do not change the capability pair.
  while (!text.empty() && std::isalpha(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  if (text.size() < 2 || !std::all_of(text.begin(), text.end(),
                                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return std::nullopt;
  return ComputeCapability{std::stoi(std::string(text.substr(0, text.size() - 1))),
                           text.back() - '0'};
}

std::string CompatVerdict::str() const {
  switch (kind) {
  case Kind::Native: return "Native(" + (capability ? capability->str() : std::string("?")) + ")";
  case Kind::JitFromPtx: return "JitFromPtx";
  case Kind::Incompatible: return "Incompatible(" + reason + ")";
  }
  return "Incompatible";
}

CompatVerdict gpu_compat(const GpuCompatInput& in) {
  using K = CompatVerdict::Kind;
  const auto driver = Version::parse(in.driver_version).value_or(Version{});
  const auto runtime = Version::parse(in.runtime_version).value_or(Version{});
  if (runtime.major() != driver.major())
    return {K::Incompatible, std::nullopt, "major mismatch"};
  if (runtime.minor() > driver.minor())
    return {K::Incompatible, std::nullopt, "driver too old for runtime"};
  if (std::find(in.cubin_capabilities.begin(), in.cubin_capabilities.end(), in.device) !=
      in.cubin_capabilities.end())
    return {K::Native, in.device, ""};
  if (in.ptx_capability && *in.ptx_capability <= in.device) {
    const auto ptx = Version::parse(in.ptx_version.value_or(in.runtime_version)).value_or(Version{});
    if (ptx <= driver)
      return {K::JitFromPtx, std::nullopt, ""};
  }
  return {K::Incompatible, std::nullopt, "no matching binary or loadable PTX"};
}

} // namespace irforge
