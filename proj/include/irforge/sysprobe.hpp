// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace irforge {

enum class LibraryOrigin { Probed, Inferred, Declared };

struct CpuInfo {
  std::string architecture = "unknown";
  std::set<std::string> vector_features; // lowercase ISA tokens
  bool operator==(const CpuInfo&) const = default;
};

struct GpuBackendInfo {
  std::optional<std::string> version;
  std::vector<std::string> libraries;
  // Needed only for CUDA compatibility checks at deployment.
  std::optional<std::string> driver_version;
  std::optional<std::string> device_capability;
  bool operator==(const GpuBackendInfo&) const = default;
};

struct LibraryInfo {
  std::optional<std::string> version;
  LibraryOrigin origin = LibraryOrigin::Declared;
  std::optional<std::string> inferred_from; // set iff origin == Inferred
  bool operator==(const LibraryInfo&) const = default;
};

struct ToolchainInfo {
  std::optional<std::string> version;
  bool operator==(const ToolchainInfo&) const = default;
};

struct SystemFeatureReport {
  CpuInfo cpu;
  std::map<std::string, GpuBackendInfo> gpu_backends;
  std::map<std::string, LibraryInfo> libraries;
  std::map<std::string, ToolchainInfo> toolchains;
  std::vector<std::string> warnings;
  bool operator==(const SystemFeatureReport&) const = default;
};

/// Where live probes look. Tests point `root` at a fake filesystem tree.
struct ProbeEnvironment {
  std::filesystem::path root = "/";
  std::optional<std::string> machine; // defaults to uname() when root is "/"
  std::vector<std::filesystem::path> extra_library_dirs;
  bool probe_toolchains = true;
};

/// Reads CPU flags, GPU runtimes and well-known libraries from the host.
/// Raises ErrorKind::ProbeUnavailable when the host exposes no CPU feature
/// list.
SystemFeatureReport probe_live(const ProbeEnvironment& env = {});

/// Reads a declared bundle. Accepts both the "CPU Info"/"GPU Backends"
/// spelling and the canonical lowercase keys this tool writes. Raises
/// ErrorKind::MalformedBundle on shape errors.
SystemFeatureReport parse_bundle(const nlohmann::json& bundle);

/// Adds runtime-implied libraries (cuFFT with CUDA, rocFFT with ROCm/HIP).
void apply_inference(SystemFeatureReport& report);

/// Entry point: live probes (when requested) overlaid by the declared
/// bundle, which wins on overlapping keys; then inference.
SystemFeatureReport discover_system(const std::optional<nlohmann::json>& bundle,
                                    bool live, const ProbeEnvironment& env = {});

nlohmann::json to_json(const SystemFeatureReport& report);

} // namespace irforge
