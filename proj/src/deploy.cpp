// SPDX-License-Identifier: Apache-2.0
#include "irforge/deploy.hpp"

#include "irforge/error.hpp"
#include "irforge/flags.hpp"
#include "irforge/forge.hpp"
#include "irforge/lower.hpp"
#include "irforge/parallel.hpp"
#include "irforge/store.hpp"

#include <algorithm>

namespace irforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::vector<std::string> expand_all(const std::vector<std::string>& flags, const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& f : flags)
    out.push_back(expand_root(f, root));
  return out;
}

const json* select_config(const json& recipe, const PointValues& canonical_sel) {
  std::vector<const json*> matches;
  for (const auto& c : recipe.at("configs")) {
    PointValues assigned;
    for (const auto& [p, v] : c.at("assignments").items())
      assigned.emplace_back(p, v.get<std::string>());
    bool all = true;
    for (const auto& pv : canonical_config(assigned))
      if (std::find(canonical_sel.begin(), canonical_sel.end(), pv) == canonical_sel.end())
        all = false;
    if (all)
      matches.push_back(&c);
  }
  if (matches.size() != 1) {
    std::string names;
    for (const auto& c : recipe.at("configs"))
      names += (names.empty() ? "" : ", ") + c.at("name").get<std::string>();
    throw Error(ErrorKind::ConfigNotInRecipe,
                std::string(matches.empty() ? "no" : "more than one") +
                    " recipe configuration matches the selection; configurations: " + names);
  }
  return matches.front();
}

std::optional<std::string> opt_string(const json& obj, const char* key) {
  if (!obj.is_object())
    return std::nullopt;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null())
    return std::nullopt;
  return it->is_string() ? it->get<std::string>() : it->dump();
}

} // namespace

DeploymentPlan plan_deployment(const json& recipe, const PointValues& selection,
                               const SystemFeatureReport& features,
                               const DeployOptions& options) {
  const VectorLevelTable& table = options.levels ? *options.levels : VectorLevelTable::builtin();
  DeploymentPlan plan;
  plan.resolved = canonical_config(selection);
  plan.tag = image_tag(plan.resolved);
  plan.opt_level_override = options.opt_level;

  const json& config = *select_config(recipe, plan.resolved);
  plan.config = config.at("name").get<std::string>();
  const json& manifest = config.at("manifest");
  plan.link = manifest.at("link");

  // Vectorization choice -> codegen flags from the level table.
  std::vector<std::string> vector_flags;
  for (const auto& [point, value] : selection) {
    const std::string p = fold_name(point);
    if (p != "vectorization" && p != "simd")
      continue;
    const VectorLevel* level = table.find(value);
    if (!level)
      throw Error(ErrorKind::UnsupportedValue,
                  "vectorization level '" + value + "' is unknown to the level table");
    if (!VectorLevelTable::supported(*level, features.cpu.vector_features))
      throw Error(ErrorKind::UnsupportedValue,
                  "vectorization level '" + value + "' needs CPU features the target lacks");
    vector_flags = level->codegen_flags;
  }

  for (const auto& e : manifest.at("entries")) {
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "source") {
      plan.sd_compiles.push_back({e.at("source").get<std::string>(),
                                  e.at("output").get<std::string>(),
                                  e.at("directory").get<std::string>(),
                                  language_from_string(e.at("language").get<std::string>()),
                                  e.at("flags").get<std::vector<std::string>>()});
      continue;
    }
    LowerStep s;
    s.artifact = e.at("artifact").get<std::string>();
    s.tu_key = e.at("tu_key").get<std::string>();
    s.source = e.at("source").get<std::string>();
    s.output = e.at("output").get<std::string>();
    s.directory = e.at("directory").get<std::string>();
    s.language = language_from_string(e.at("language").get<std::string>());
    s.residual_flags = e.at("residual_flags").get<std::vector<std::string>>();
    s.opt_level = e.at("opt_level").get<std::string>();
    s.arch_flags = e.at("arch_profile").get<std::vector<std::string>>();
    s.arch_flags.insert(s.arch_flags.end(), vector_flags.begin(), vector_flags.end());
    for (const auto& f : s.residual_flags) {
      if (f == kArchPlaceholder) {
        s.flags.insert(s.flags.end(), s.arch_flags.begin(), s.arch_flags.end());
      } else if (options.opt_level && f.starts_with("-O")) {
        s.flags.push_back(*options.opt_level);
      } else {
        s.flags.push_back(f);
      }
    }
    if (options.opt_level)
      s.opt_level = *options.opt_level;
    plan.steps.push_back(std::move(s));
  }

  // GPU configurations: backend presence, CUDA compatibility, layer binding.
  for (const auto& [point, value_json] : config.at("assignments").items()) {
    const std::string value = value_json.get<std::string>();
    if (!is_gpu_assignment(point, value))
      continue;
    auto host = std::find_if(features.gpu_backends.begin(), features.gpu_backends.end(),
                             [&](const auto& kv) { return fold_name(kv.first) == fold_name(value); });
    if (host == features.gpu_backends.end())
      throw Error(ErrorKind::IncompatibleGpu,
                  "configuration needs GPU backend " + value + ", which the target lacks");

    const json gpu = recipe.value("gpu", json(nullptr));
    const json pinned = recipe.value("runtime_pinned", json(nullptr));
    const auto pinned_version = opt_string(pinned, "runtime_version");
    const auto bound_version = pinned_version ? pinned_version : host->second.version;

    if (fold_name(value) == "cuda") {
      if (!host->second.driver_version || !host->second.device_capability)
        throw Error(ErrorKind::IncompatibleGpu,
                    "CUDA target lacks driver_version/device_capability in the feature report");
      auto device = parse_capability(*host->second.device_capability);
      if (!device)
        throw Error(ErrorKind::IncompatibleGpu,
                    "unparseable device capability '" + *host->second.device_capability + "'");
      GpuCompatInput in;
      in.driver_version = *host->second.driver_version;
      in.device = *device;
      in.runtime_version = bound_version.value_or(opt_string(gpu, "runtime_version").value_or(""));
      in.ptx_version = opt_string(gpu, "ptx_version");
      if (auto ptx = opt_string(gpu, "ptx_capability"))
        in.ptx_capability = parse_capability(*ptx);
      if (gpu.is_object() && gpu.contains("cubin_capabilities"))
        for (const auto& c : gpu["cubin_capabilities"])
          if (auto cap = parse_capability(c.get<std::string>()))
            in.cubin_capabilities.push_back(*cap);
      plan.verdict = gpu_compat(in);
      if (plan.verdict->kind == CompatVerdict::Kind::Incompatible)
        throw Error(ErrorKind::IncompatibleGpu, "GPU verdict " + plan.verdict->str());
    }

    const json layers = recipe.value("deferred_layers", json::object());
    std::optional<std::string> tmpl;
    for (const auto& [name, ref] : layers.items())
      if (fold_name(name) == fold_name(value) && ref.is_string())
        tmpl = ref.get<std::string>();
    if (!tmpl)
      throw Error(ErrorKind::MissingLayer, "no runtime layer template for backend " + value);
    if (tmpl->find("{version}") != std::string::npos) {
      if (!bound_version)
        throw Error(ErrorKind::MissingLayer,
                    "runtime layer for " + value + " needs a version the target does not report");
      *tmpl = replace_all(*tmpl, "{version}", *bound_version);
    }
    plan.layers[value] = *tmpl;
  }
  return plan;
}

json to_json(const DeploymentPlan& plan) {
  json resolved = json::array();
  for (const auto& [p, v] : plan.resolved)
    resolved.push_back({{"point", p}, {"value", v}});
  json steps = json::array();
  for (const auto& s : plan.steps)
    steps.push_back({{"artifact", s.artifact},
                     {"tu_key", s.tu_key},
                     {"source", s.source},
                     {"output", s.output},
                     {"directory", s.directory},
                     {"language", to_string(s.language)},
                     {"residual_flags", s.residual_flags},
                     {"arch_flags", s.arch_flags},
                     {"flags", s.flags},
                     {"opt_level", s.opt_level}});
  json sd = json::array();
  for (const auto& s : plan.sd_compiles)
    sd.push_back({{"source", s.source},
                  {"output", s.output},
                  {"directory", s.directory},
                  {"language", to_string(s.language)},
                  {"flags", s.flags}});
  json doc = {{"config", plan.config},   {"resolved", resolved}, {"tag", plan.tag},
              {"steps", steps},          {"sd_compiles", sd},    {"link_phase", plan.link},
              {"layers", plan.layers},
              {"verdict", plan.verdict ? json(plan.verdict->str()) : json(nullptr)},
              {"opt_level_override",
               plan.opt_level_override ? json(*plan.opt_level_override) : json(nullptr)}};
  return doc;
}

void execute_deployment(const DeploymentPlan& plan, const ToolchainDriver& driver,
                        const fs::path& store_dir, const fs::path& build_root, unsigned jobs) {
  IrStore store(store_dir);
  const size_t n = plan.steps.size() + plan.sd_compiles.size();
  parallel_for(n, jobs, [&](size_t i) {
    if (i < plan.steps.size()) {
      const LowerStep& s = plan.steps[i];
      store.verify(s.artifact);
      fs::create_directories(expand_root(s.directory, build_root));
      lower_ir(driver, store.artifact_path(s.artifact), expand_all(s.flags, build_root),
               s.language, expand_root(s.output, build_root),
               expand_root(s.directory, build_root), plan.config + ": " + s.source);
      return;
    }
    const SourceCompile& c = plan.sd_compiles[i - plan.steps.size()];
    const fs::path out = expand_root(c.output, build_root);
    if (out.has_parent_path())
      fs::create_directories(out.parent_path());
    fs::create_directories(expand_root(c.directory, build_root));
    driver.run(Capability::Lower, expand_all(c.flags, build_root),
               expand_root(c.source, build_root), out.string(),
               expand_root(c.directory, build_root), plan.config + ": " + c.source);
  });
}

} // namespace irforge
