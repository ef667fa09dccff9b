// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irforge/arch_flags.hpp"
#include "irforge/buildscan.hpp"
#include "irforge/driver.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace irforge {

/// Identity of one distinct IR file.
struct TUKey {
  std::string preprocessed_digest;
  std::vector<std::string> residual_flags; // codegen-relevant flags only
  Language language = Language::Other;
  std::vector<std::string> device_context; // CUDA: virtual archs + GPU assignment

  /// SHA-256 over a canonical serialization of all fields.
  std::string id() const;
  bool operator==(const TUKey&) const = default;
};

struct PlanMember {
  std::string config;
  TargetId target;
  bool operator==(const PlanMember&) const = default;
};

/// A distinct IR file and the (config, target) pairs that share it.
struct PlanKey {
  TUKey key;
  std::vector<PlanMember> members;   // config order, then target order
  std::vector<std::string> configs;  // distinct, config order
  std::vector<std::string> emission_flags; // canonical, placeholder form
  std::string source;    // canonical source path of the representative
  std::string directory; // canonical working directory of the representative
  std::string emission_config; // representative's configuration
  bool openmp_merged = false;  // OpenMP flag dropped: no constructs in the TU
  bool arch_bound = false;     // source text depends on the arch flags
};

/// Per (config, target) record: where its code comes from and how to lower it.
struct PlanTarget {
  TargetId id;
  Language language = Language::Other;
  std::string directory;
  std::vector<std::string> flags;    // full canonical FlagSet
  std::vector<std::string> residual; // flags minus the ArchProfile
  ArchProfile profile;
  std::string opt_level; // recorded optimization flag, e.g. "-O3"
  std::optional<std::string> key_id; // absent for SD targets
};

struct PlanConfig {
  std::string name;
  std::map<std::string, std::string> assignments;
  std::string build_root;
  std::vector<PlanTarget> targets;
};

struct DedupPlan {
  std::vector<PlanConfig> configs;
  std::map<std::string, PlanKey> keys; // key id -> key
  std::vector<std::string> core;       // key ids shared by every config containing them
  std::map<std::string, std::vector<std::string>> deltas;       // config -> key ids
  std::map<std::string, std::vector<TargetId>> sd_targets;      // config -> SD targets

  const PlanConfig* find_config(const std::string& name) const;
};

struct DedupReport {
  size_t N = 0;
  std::map<std::string, size_t> T; // per configuration
  size_t sum_T = 0;
  size_t T_prime = 0;
  double reduction = 0.0; // 1 - T'/sum_T, rounded to 4 decimals
  size_t si_count = 0;    // distinct SI target ids
  size_t sd_count = 0;    // distinct SD target ids
  size_t core_keys = 0;
  size_t delta_keys = 0;
};

struct DedupOptions {
  std::vector<std::string> sd_list; // source paths or "source -> output" ids
  unsigned jobs = 1;
};

/// SD = user-declared ∪ language `other` ∪ languages the driver cannot turn
/// into IR. Raises ErrorKind::UnknownTargetId for unmatched list entries.
struct Partition {
  std::vector<std::pair<std::string, TargetId>> si;
  std::vector<std::pair<std::string, TargetId>> sd;
};
Partition partition_targets(const std::vector<BuildConfiguration>& configs,
                            const std::vector<std::string>& user_sd_list,
                            const ToolchainDriver& driver);

/// Line-marker normalization applied before digesting preprocessed text.
std::string normalize_line_markers(std::string_view text, const std::filesystem::path& root);

/// Flags that only influence preprocessing or diagnostics, plus mode flags.
bool is_preprocessor_only_flag(const std::string& flag);

/// Codegen-relevant subset of a residual FlagSet.
std::vector<std::string> codegen_flags(const std::vector<std::string>& residual);

/// Flags for a preprocessing run: drops mode and dependency-file options.
std::vector<std::string> preprocess_flags(const std::vector<std::string>& flags);

std::string recorded_opt_level(const std::vector<std::string>& flags);

/// Runs the behavioral comparison over every SI target and assembles the
/// plan. Any toolchain failure aborts the whole run (DriverError).
std::pair<DedupPlan, DedupReport> dedup(const std::vector<BuildConfiguration>& configs,
                                        const ToolchainDriver& driver,
                                        const DedupOptions& options = {});

DedupReport make_report(const DedupPlan& plan);

nlohmann::json to_json(const DedupPlan& plan);
nlohmann::json to_json(const DedupReport& report);
DedupPlan plan_from_json(const nlohmann::json& doc);

} // namespace irforge
