// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irforge {

struct ComputeCapability {
  int major = 0;
  int minor = 0;
  auto operator<=>(const ComputeCapability&) const = default;
  std::string str() const; // "sm_80"
};

/// Accepts "sm_80", "compute_80", "8.0" and "80" (last digit is the minor).
std::optional<ComputeCapability> parse_capability(std::string_view text);

struct GpuCompatInput {
  // host
  std::string driver_version; // highest CUDA version the driver supports
  ComputeCapability device;
  // container
  std::string runtime_version;
  std::optional<std::string> ptx_version; // toolkit that produced the PTX; defaults to runtime
  std::optional<ComputeCapability> ptx_capability; // absent: no PTX shipped
  std::vector<ComputeCapability> cubin_capabilities;
};

struct CompatVerdict {
  enum class Kind { Native, JitFromPtx, Incompatible };
  Kind kind = Kind::Incompatible;
  std::optional<ComputeCapability> capability; // for Native
  std::string reason;                          // for Incompatible

  bool operator==(const CompatVerdict&) const = default;
  std::string str() const;
};

/// Ordered rule table: major mismatch, driver older than runtime, exact
/// cubin, loadable PTX, otherwise incompatible.
CompatVerdict gpu_compat(const GpuCompatInput& input);

} // namespace irforge
