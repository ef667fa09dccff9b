// SPDX-License-Identifier: Apache-2.0
#include "irforge/forge.hpp"

#include "irforge/error.hpp"
#include "irforge/flags.hpp"
#include "irforge/image_tag.hpp"
#include "irforge/io.hpp"
#include "irforge/parallel.hpp"
#include "irforge/store.hpp"

#include <regex>
#include <set>

namespace irforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kContainerStore = "/opt/irforge/store";
constexpr const char* kContainerSource = "/opt/irforge/src";
constexpr const char* kContainerManifests = "/opt/irforge/manifests";
constexpr const char* kContainerBuilds = "/opt/irforge/builds";

std::vector<std::string> expand_all(const std::vector<std::string>& flags, const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& f : flags)
    out.push_back(expand_root(f, root));
  return out;
}

std::string quote_label(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\')
      out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

} // namespace

bool is_gpu_assignment(const std::string& point, const std::string& value) {
  const std::string p = fold_name(point);
  if (p != "gpu" && p != "gpu_backend")
    return false;
  const std::string v = fold_name(value);
  return !(v.empty() || v == "off" || v == "none" || v == "cpu" || v == "false");
}

bool uses_runtime_version_macro(std::string_view text) {
  static const std::regex re(R"(\b(CUDART_VERSION|CUDA_VERSION|__CUDACC_VER_MAJOR__)\b)");
  return std::regex_search(text.begin(), text.end(), re);
}

std::vector<IRArtifact> emit_ir_set(const DedupPlan& plan, const ToolchainDriver& driver,
                                    const fs::path& store_dir, unsigned jobs, EmitStats* stats) {
  IrStore store(store_dir);
  std::vector<const std::pair<const std::string, PlanKey>*> keys;
  for (const auto& entry : plan.keys)
    keys.push_back(&entry);

  std::vector<IRArtifact> artifacts(keys.size());
  TempDir scratch("irforge-emit");
  parallel_for(keys.size(), jobs, [&](size_t i) {
    const auto& [key_id, pk] = *keys[i];
    IRArtifact art;
    art.key_id = key_id;
    art.tu_key = pk.key;
    art.emission_flags = pk.emission_flags;
    if (auto cached = store.lookup(key_id); cached && store.contains(*cached)) {
      store.verify(*cached);
      art.id = *cached;
      art.path = store.artifact_path(*cached);
      art.cache_hit = true;
      artifacts[i] = std::move(art);
      return;
    }
    const PlanConfig* rep = plan.find_config(pk.emission_config);
    if (!rep)
      throw Error(ErrorKind::Malformed, "plan key " + key_id + " names unknown configuration '" +
                                            pk.emission_config + "'");
    const fs::path root = rep->build_root;
    const fs::path out = scratch.path() / (key_id + ".bc");
    driver.run(Capability::EmitIr, preprocess_flags(expand_all(pk.emission_flags, root)),
               expand_root(pk.source, root), out.string(), expand_root(pk.directory, root),
               pk.emission_config + ": " + pk.source);
    art.id = store.put(read_file(out));
    art.path = store.artifact_path(art.id);
    artifacts[i] = std::move(art);
  });

  for (const auto& a : artifacts) {
    store.record(a.key_id, a.id);
    if (stats)
      ++(a.cache_hit ? stats->cache_hits : stats->emitted);
  }
  store.save_index();
  return artifacts;
}

json render_install_manifest(const std::string& config_name, const DedupPlan& plan,
                             const std::vector<IRArtifact>& artifacts) {
  const PlanConfig* config = plan.find_config(config_name);
  if (!config)
    throw Error(ErrorKind::ConfigNotInRecipe, "configuration '" + config_name + "' is not in the plan");
  if (config->targets.empty())
    throw Error(ErrorKind::EmptyConfig, "configuration '" + config_name + "' has no targets");

  std::map<std::string, const IRArtifact*> by_key;
  for (const auto& a : artifacts)
    by_key[a.key_id] = &a;

  json entries = json::array();
  for (const auto& t : config->targets) {
    if (!t.key_id) {
      entries.push_back({{"kind", "source"},
                         {"source", t.id.source},
                         {"output", t.id.output},
                         {"directory", t.directory},
                         {"language", to_string(t.language)},
                         {"flags", t.flags}});
      continue;
    }
    auto it = by_key.find(*t.key_id);
    if (it == by_key.end())
      throw Error(ErrorKind::MissingArtifact,
                  "no IR artifact for " + t.id.str() + " (key " + *t.key_id + ")");
    std::vector<std::string> flags = t.residual;
    flags.emplace_back(kArchPlaceholder);
    entries.push_back({{"kind", "ir"},
                       {"artifact", it->second->id},
                       {"tu_key", *t.key_id},
                       {"source", t.id.source},
                       {"output", t.id.output},
                       {"directory", t.directory},
                       {"language", to_string(t.language)},
                       {"residual_flags", flags},
                       {"arch_profile", t.profile.tokens},
                       {"opt_level", t.opt_level}});
  }
  return {{"config", config->name},
          {"assignments", config->assignments},
          {"build_root", std::string(kBuildPlaceholder)},
          {"entries", entries},
          {"link",
           {{"directive", "delegate-to-build-system"},
            {"command", json::array({"cmake", "--build", std::string(kBuildPlaceholder)})}}}};
}

ContainerRecipe render_container_recipe(const DedupPlan& plan,
                                        const std::vector<json>& manifests,
                                        const json& bases) {
  if (plan.configs.empty())
    throw Error(ErrorKind::EmptyPlan, "the plan contains no configurations");
  if (!bases.is_object() || !bases.contains("toolchain") || !bases["toolchain"].is_string())
    throw Error(ErrorKind::MissingLayer, "bases must name a toolchain layer");

  std::map<std::string, json> manifest_by_config;
  for (const auto& m : manifests)
    manifest_by_config[m.at("config").get<std::string>()] = m;

  std::map<std::string, std::set<std::string>> points_used;
  std::set<std::string> deferred_backends;
  json configs = json::array();
  for (const auto& c : plan.configs) {
    auto m = manifest_by_config.find(c.name);
    if (m == manifest_by_config.end())
      throw Error(ErrorKind::MissingArtifact, "no manifest for configuration '" + c.name + "'");
    PointValues pv(c.assignments.begin(), c.assignments.end());
    for (const auto& [p, v] : c.assignments) {
      points_used[p].insert(v);
      if (is_gpu_assignment(p, v))
        deferred_backends.insert(v);
    }
    configs.push_back({{"name", c.name},
                       {"assignments", c.assignments},
                       {"tag", image_tag(pv)},
                       {"build_dir", std::string(kContainerBuilds) + "/" + c.name},
                       {"manifest_path", std::string(kContainerManifests) + "/" + c.name + ".json"},
                       {"manifest", m->second}});
  }

  json deferred = json::object();
  const json base_deferred = bases.value("deferred", json::object());
  for (const auto& backend : deferred_backends) {
    json ref = nullptr;
    for (const auto& [name, tmpl] : base_deferred.items())
      if (fold_name(name) == fold_name(backend))
        ref = tmpl;
    deferred[backend] = ref;
  }

  // Pessimistic check: sources that test the CUDA runtime version at build
  // time pin the container to the build-time runtime.
  json pinned = nullptr;
  if (!deferred_backends.empty()) {
    std::set<std::string> evidence;
    for (const auto& c : plan.configs)
      for (const auto& t : c.targets) {
        const fs::path src = expand_root(t.id.source, c.build_root);
        std::error_code ec;
        if (!fs::is_regular_file(src, ec))
          continue;
        if (uses_runtime_version_macro(read_file(src)))
          evidence.insert(t.id.source);
      }
    if (!evidence.empty()) {
      const json gpu = bases.value("gpu", json::object());
      pinned = {{"runtime_version", gpu.value("runtime_version", json(nullptr))},
                {"evidence", evidence}};
    }
  }

  json points = json::object();
  for (const auto& [p, vs] : points_used)
    points[p] = vs;
  json annotations = {{"io.irforge.specialization-points", points.dump()},
                      {"io.irforge.configurations", std::to_string(plan.configs.size())}};
  if (!deferred_backends.empty()) {
    std::string names;
    for (const auto& b : deferred_backends)
      names += (names.empty() ? "" : ",") + b;
    annotations["io.irforge.deferred-layers"] = names;
  }

  ContainerRecipe recipe;
  recipe.doc = {{"toolchain", bases["toolchain"]},
                {"store", kContainerStore},
                {"source_tree", {{"host", bases.value("source_tree", json(nullptr))},
                                 {"mount", kContainerSource}}},
                {"configs", configs},
                {"deferred_layers", deferred},
                {"gpu", bases.value("gpu", json(nullptr))},
                {"runtime_pinned", pinned},
                {"annotations", annotations}};

  std::string df;
  df += "# Generated by irforge; GPU runtime layers are bound at deployment.\n";
  df += "FROM " + bases["toolchain"].get<std::string>() + "\n";
  for (const auto& [k, v] : annotations.items())
    df += "LABEL " + k + "=" + quote_label(v.get<std::string>()) + "\n";
  df += "COPY store/ " + std::string(kContainerStore) + "/\n";
  df += "COPY source/ " + std::string(kContainerSource) + "/\n";
  for (const auto& c : plan.configs)
    df += "COPY builds/" + c.name + "/ " + kContainerBuilds + "/" + c.name + "/\n";
  df += "COPY manifests/ " + std::string(kContainerManifests) + "/\n";
  recipe.dockerfile = df;
  recipe.doc["dockerfile"] = df;
  return recipe;
}

} // namespace irforge
