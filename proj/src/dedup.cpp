// SPDX-License-Identifier: Apache-2.0
#include "irforge/dedup.hpp"

#include "irforge/digest.hpp"
#include "irforge/error.hpp"
#include "irforge/flags.hpp"
#include "irforge/io.hpp"
#include "irforge/openmp.hpp"
#include "irforge/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace irforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool one_of(const std::string& s, std::initializer_list<std::string_view> list) {
  return std::find(list.begin(), list.end(), s) != list.end();
}

// Options whose following token belongs to them and is only relevant to
// preprocessing.
bool preprocessor_pair(const std::string& f) {
  return one_of(f, {"-D", "-U", "-I", "-isystem", "-iquote", "-idirafter", "-include",
                    "-imacros", "-MF", "-MT", "-MQ", "-Xpreprocessor"});
}

bool dependency_flag(const std::string& f) {
  return one_of(f, {"-M", "-MM", "-MD", "-MMD", "-MP", "-MG"}) || f.starts_with("-MF") ||
         f.starts_with("-MT") || f.starts_with("-MQ") || f.starts_with("-Wp,-MD") ||
         f.starts_with("-Wp,-MMD");
}

std::vector<std::string> expand_all(const std::vector<std::string>& flags, const fs::path& root) {
  std::vector<std::string> out;
  out.reserve(flags.size());
  for (const auto& f : flags)
    out.push_back(expand_root(f, root));
  return out;
}

std::vector<std::string> device_context(const BuildConfiguration& config,
                                        const CompilationTarget& target) {
  if (target.language != Language::Cuda)
    return {};
  std::vector<std::string> ctx;
  for (size_t i = 0; i < target.flags.size(); ++i) {
    const auto& f = target.flags[i];
    if (f.starts_with("--cuda-gpu-arch=") || f.starts_with("--offload-arch=") ||
        f.starts_with("-arch=compute_") || f.starts_with("--generate-code") ||
        f.starts_with("-gencode=") || f.starts_with("-gencode"))
      ctx.push_back(f);
    if ((f == "-gencode" || f == "--generate-code") && i + 1 < target.flags.size())
      ctx.push_back(target.flags[i + 1]);
  }
  std::sort(ctx.begin(), ctx.end());
  for (const auto& [point, value] : config.assignments)
    if (fold_name(point) == "gpu" || fold_name(point) == "gpu_backend")
      ctx.push_back("gpu=" + value);
  return ctx;
}

struct Analysis {
  std::string digest;
  std::vector<std::string> key_flags;
  std::vector<std::string> emission_flags;
  bool openmp_merged = false;
  bool arch_bound = false;
  bool has_openmp_flag = false;
};

struct WorkItem {
  size_t config;
  size_t target;
};

} // namespace

std::string TUKey::id() const {
  json doc = {{"digest", preprocessed_digest},
              {"flags", residual_flags},
              {"language", to_string(language)},
              {"device", device_context}};
  return sha256_hex(doc.dump());
}

const PlanConfig* DedupPlan::find_config(const std::string& name) const {
  for (const auto& c : configs)
    if (c.name == name)
      return &c;
  return nullptr;
}

bool is_preprocessor_only_flag(const std::string& f) {
  if (f.starts_with("-Wl,") || f.starts_with("-Wa,"))
    return false;
  if (f.starts_with("-D") || f.starts_with("-U") || f.starts_with("-I") ||
      f.starts_with("-isystem") || f.starts_with("-iquote") || f.starts_with("-idirafter") ||
      f.starts_with("-include") || f.starts_with("-imacros"))
    return true;
  if (dependency_flag(f))
    return true;
  if (f.starts_with("-W") || f == "-w" || f == "-pedantic" || f == "-pedantic-errors")
    return true;
  return one_of(f, {"-c", "-S", "-E"});
}

std::vector<std::string> codegen_flags(const std::vector<std::string>& residual) {
  std::vector<std::string> out;
  for (size_t i = 0; i < residual.size(); ++i) {
    const auto& f = residual[i];
    if (preprocessor_pair(f) && i + 1 < residual.size()) {
      ++i;
      continue;
    }
    if (is_preprocessor_only_flag(f))
      continue;
    out.push_back(f);
  }
  return out;
}

std::vector<std::string> preprocess_flags(const std::vector<std::string>& flags) {
  std::vector<std::string> out;
  for (size_t i = 0; i < flags.size(); ++i) {
    const auto& f = flags[i];
    if (one_of(f, {"-MF", "-MT", "-MQ"}) && i + 1 < flags.size()) {
      ++i;
      continue;
    }
    if (one_of(f, {"-c", "-S", "-E"}) || dependency_flag(f))
      continue;
    out.push_back(f);
  }
  return out;
}

std::string recorded_opt_level(const std::vector<std::string>& flags) {
  std::string level = "-O0";
  for (const auto& f : flags)
    if (f.starts_with("-O"))
      level = f;
  return level;
}

namespace {

/// Line markers for the compiler's pseudo-files carry no code; their line
/// numbers only count predefined and command-line macros, which are already
/// reflected in the expanded text.
bool is_pseudo_file_marker(std::string_view line) {
  if (!line.starts_with("# ") || line.size() < 3 || !std::isdigit(static_cast<unsigned char>(line[2])))
    return false;
  return line.find("\"<built-in>\"") != std::string_view::npos ||
         line.find("\"<command line>\"") != std::string_view::npos;
}

} // namespace

std::string normalize_line_markers(std::string_view text, const fs::path& root) {
  std::string r = root.lexically_normal().string();
  while (r.size() > 1 && r.back() == '/')
    r.pop_back();
  std::string out;
  out.reserve(text.size());
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    const size_t end = nl == std::string_view::npos ? text.size() : nl + 1;
    std::string_view line = text.substr(pos, end - pos);
    pos = end;
    const auto first = line.find_first_not_of(" \t");
    if (is_pseudo_file_marker(line))
      continue;
    if (r.size() <= 1 || first == std::string_view::npos || line[first] != '#') {
      out.append(line);
      continue;
    }
    size_t i = 0;
    while (i < line.size()) {
      const size_t hit = line.find(r, i);
      if (hit == std::string_view::npos) {
        out.append(line.substr(i));
        break;
      }
      out.append(line.substr(i, hit - i));
      const size_t after = hit + r.size();
      const bool boundary = hit > 0 && line[hit - 1] == '"' && after < line.size() &&
                            (line[after] == '/' || line[after] == '"');
      out.append(boundary ? std::string(kBuildPlaceholder) : r);
      i = after;
    }
  }
  return out;
}

Partition partition_targets(const std::vector<BuildConfiguration>& configs,
                            const std::vector<std::string>& user_sd_list,
                            const ToolchainDriver& driver) {
  std::vector<bool> used(user_sd_list.size(), false);
  Partition part;
  for (const auto& c : configs) {
    for (const auto& t : c.targets) {
      bool sd = t.language == Language::Other || !driver.can_emit_ir(t.language);
      for (size_t i = 0; i < user_sd_list.size(); ++i) {
        const auto& entry = user_sd_list[i];
        if (entry == t.id.source || entry == t.id.str()) {
          sd = true;
          used[i] = true;
        }
      }
      (sd ? part.sd : part.si).emplace_back(c.name, t.id);
    }
  }
  for (size_t i = 0; i < user_sd_list.size(); ++i)
    if (!used[i])
      throw Error(ErrorKind::UnknownTargetId,
                  "SD list entry '" + user_sd_list[i] + "' matches no target");
  return part;
}

std::pair<DedupPlan, DedupReport> dedup(const std::vector<BuildConfiguration>& configs,
                                        const ToolchainDriver& driver,
                                        const DedupOptions& options) {
  if (configs.empty())
    throw Error(ErrorKind::EmptyInput, "dedup needs at least one configuration");
  {
    std::set<std::string> names;
    for (const auto& c : configs)
      if (!names.insert(c.name).second)
        throw Error(ErrorKind::Malformed, "duplicate configuration name '" + c.name + "'");
  }

  const Partition part = partition_targets(configs, options.sd_list, driver);
  std::set<std::pair<std::string, TargetId>> sd_set(part.sd.begin(), part.sd.end());

  std::vector<WorkItem> work;
  for (size_t ci = 0; ci < configs.size(); ++ci)
    for (size_t ti = 0; ti < configs[ci].targets.size(); ++ti)
      if (!sd_set.contains({configs[ci].name, configs[ci].targets[ti].id}))
        work.push_back({ci, ti});

  TempDir scratch("irforge-dedup");
  std::vector<Analysis> results(work.size());

  parallel_for(work.size(), options.jobs, [&](size_t i) {
    const BuildConfiguration& config = configs[work[i].config];
    const CompilationTarget& target = config.targets[work[i].target];
    const fs::path root = config.build_root;
    const fs::path cwd = expand_root(target.directory, root);
    const std::string source = expand_root(target.id.source, root);
    const std::string unit = config.name + ": " + target.id.str();

    auto preprocess = [&](const std::vector<std::string>& canonical, const char* tag) {
      const fs::path out = scratch.path() / (std::to_string(i) + tag + ".i");
      driver.run(Capability::Preprocess, preprocess_flags(expand_all(canonical, root)), source,
                 out.string(), cwd, unit);
      std::string text = normalize_line_markers(read_file(out), root);
      fs::remove(out);
      return text;
    };

    const ArchSplit split = strip_arch_flags(target.flags);
    Analysis a;
    std::string text = preprocess(split.residual, "r");
    a.digest = sha256_hex(text);
    std::vector<std::string> residual = split.residual;
    if (!split.profile.tokens.empty()) {
      std::string full = preprocess(target.flags, "f");
      std::string full_digest = sha256_hex(full);
      if (full_digest != a.digest) {
        a.arch_bound = true;
        a.digest = std::move(full_digest);
        text = std::move(full);
        residual = target.flags;
      }
    }
    a.key_flags = codegen_flags(residual);
    a.emission_flags = residual;
    a.has_openmp_flag = std::any_of(residual.begin(), residual.end(),
                                    [](const std::string& f) { return is_openmp_flag(f); });
    if (a.has_openmp_flag && !classify_openmp(text)) {
      a.openmp_merged = true;
      a.key_flags = without_openmp(a.key_flags);
    }
    results[i] = std::move(a);
  });

  DedupPlan plan;
  std::map<std::pair<size_t, size_t>, size_t> work_index;
  for (size_t i = 0; i < work.size(); ++i)
    work_index[{work[i].config, work[i].target}] = i;

  std::map<std::string, bool> rep_has_openmp;
  for (size_t ci = 0; ci < configs.size(); ++ci) {
    const auto& config = configs[ci];
    PlanConfig pc;
    pc.name = config.name;
    pc.assignments = config.assignments;
    pc.build_root = config.build_root.string();
    for (size_t ti = 0; ti < config.targets.size(); ++ti) {
      const auto& t = config.targets[ti];
      PlanTarget pt;
      pt.id = t.id;
      pt.language = t.language;
      pt.directory = t.directory;
      pt.flags = t.flags;
      const ArchSplit split = strip_arch_flags(t.flags);
      pt.residual = split.residual;
      pt.profile = split.profile;
      pt.opt_level = recorded_opt_level(t.flags);

      auto wi = work_index.find({ci, ti});
      if (wi == work_index.end()) {
        plan.sd_targets[config.name].push_back(t.id);
      } else {
        const Analysis& a = results[wi->second];
        TUKey key{a.digest, a.key_flags, t.language, device_context(config, t)};
        const std::string id = key.id();
        pt.key_id = id;
        auto [it, fresh] = plan.keys.try_emplace(id);
        PlanKey& pk = it->second;
        // Representative: the first member, preferring one built without
        // the OpenMP flag so emission reproduces the digested text.
        const bool take = fresh || (rep_has_openmp[id] && !a.has_openmp_flag);
        if (fresh)
          pk.key = key;
        if (take) {
          pk.emission_flags = a.emission_flags;
          pk.source = t.id.source;
          pk.directory = t.directory;
          pk.emission_config = config.name;
          pk.arch_bound = a.arch_bound;
          rep_has_openmp[id] = a.has_openmp_flag;
        }
        pk.openmp_merged = pk.openmp_merged || a.openmp_merged;
        pk.members.push_back({config.name, t.id});
        if (std::find(pk.configs.begin(), pk.configs.end(), config.name) == pk.configs.end())
          pk.configs.push_back(config.name);
      }
      pc.targets.push_back(std::move(pt));
    }
    plan.configs.push_back(std::move(pc));
  }

  // Core: the key serves every configuration that builds any of its targets.
  std::map<TargetId, std::set<std::string>> configs_with_target;
  for (const auto& c : configs)
    for (const auto& t : c.targets)
      configs_with_target[t.id].insert(c.name);
  std::set<std::string> placed;
  for (const auto& c : plan.configs) {
    for (const auto& t : c.targets) {
      if (!t.key_id || placed.contains(*t.key_id))
        continue;
      placed.insert(*t.key_id);
      const PlanKey& pk = plan.keys.at(*t.key_id);
      std::set<std::string> containing;
      for (const auto& m : pk.members)
        containing.insert(configs_with_target[m.target].begin(),
                          configs_with_target[m.target].end());
      const std::set<std::string> using_key(pk.configs.begin(), pk.configs.end());
      if (using_key == containing) {
        plan.core.push_back(*t.key_id);
      } else {
        for (const auto& name : pk.configs)
          plan.deltas[name].push_back(*t.key_id);
      }
    }
  }
  return {plan, make_report(plan)};
}

DedupReport make_report(const DedupPlan& plan) {
  DedupReport r;
  r.N = plan.configs.size();
  std::set<TargetId> si_ids, sd_ids;
  size_t sd_pairs = 0;
  for (const auto& c : plan.configs) {
    r.T[c.name] = c.targets.size();
    r.sum_T += c.targets.size();
    for (const auto& t : c.targets) {
      if (t.key_id) {
        si_ids.insert(t.id);
      } else {
        sd_ids.insert(t.id);
        ++sd_pairs;
      }
    }
  }
  r.T_prime = plan.keys.size() + sd_pairs;
  r.reduction = r.sum_T == 0 ? 0.0
                             : std::round((1.0 - static_cast<double>(r.T_prime) /
                                                     static_cast<double>(r.sum_T)) *
                                          10000.0) /
                                   10000.0;
  r.si_count = si_ids.size();
  r.sd_count = sd_ids.size();
  r.core_keys = plan.core.size();
  std::set<std::string> delta_ids;
  for (const auto& [c, ids] : plan.deltas)
    delta_ids.insert(ids.begin(), ids.end());
  r.delta_keys = delta_ids.size();
  return r;
}

namespace {

json target_id_json(const TargetId& id) { return {{"source", id.source}, {"output", id.output}}; }
TargetId target_id_from(const json& j) {
  return {j.at("source").get<std::string>(), j.at("output").get<std::string>()};
}

} // namespace

json to_json(const DedupPlan& plan) {
  json configs = json::array();
  for (const auto& c : plan.configs) {
    json targets = json::array();
    for (const auto& t : c.targets) {
      json jt = {{"source", t.id.source},
                 {"output", t.id.output},
                 {"language", to_string(t.language)},
                 {"directory", t.directory},
                 {"flags", t.flags},
                 {"residual", t.residual},
                 {"arch_profile", t.profile.tokens},
                 {"opt_level", t.opt_level},
                 {"key", t.key_id ? json(*t.key_id) : json(nullptr)}};
      targets.push_back(jt);
    }
    configs.push_back({{"name", c.name},
                       {"assignments", c.assignments},
                       {"build_root", c.build_root},
                       {"targets", targets}});
  }
  json keys = json::object();
  for (const auto& [id, k] : plan.keys) {
    json members = json::array();
    for (const auto& m : k.members)
      members.push_back({{"config", m.config}, {"target", target_id_json(m.target)}});
    keys[id] = {{"preprocessed_digest", k.key.preprocessed_digest},
                {"residual_flags", k.key.residual_flags},
                {"language", to_string(k.key.language)},
                {"device_context", k.key.device_context},
                {"members", members},
                {"configs", k.configs},
                {"emission_flags", k.emission_flags},
                {"source", k.source},
                {"directory", k.directory},
                {"emission_config", k.emission_config},
                {"openmp_merged", k.openmp_merged},
                {"arch_bound", k.arch_bound}};
  }
  json sd = json::object();
  for (const auto& [c, ids] : plan.sd_targets) {
    json list = json::array();
    for (const auto& id : ids)
      list.push_back(target_id_json(id));
    sd[c] = list;
  }
  return {{"configs", configs}, {"keys", keys}, {"core", plan.core},
          {"deltas", plan.deltas}, {"sd_targets", sd}};
}

DedupPlan plan_from_json(const json& doc) {
  try {
    DedupPlan plan;
    for (const auto& c : doc.at("configs")) {
      PlanConfig pc;
      pc.name = c.at("name").get<std::string>();
      pc.assignments = c.value("assignments", std::map<std::string, std::string>{});
      pc.build_root = c.at("build_root").get<std::string>();
      for (const auto& t : c.at("targets")) {
        PlanTarget pt;
        pt.id = target_id_from(t);
        pt.language = language_from_string(t.at("language").get<std::string>());
        pt.directory = t.at("directory").get<std::string>();
        pt.flags = t.at("flags").get<std::vector<std::string>>();
        pt.residual = t.at("residual").get<std::vector<std::string>>();
        pt.profile.tokens = t.at("arch_profile").get<std::vector<std::string>>();
        pt.opt_level = t.at("opt_level").get<std::string>();
        if (!t.at("key").is_null())
          pt.key_id = t.at("key").get<std::string>();
        pc.targets.push_back(std::move(pt));
      }
      plan.configs.push_back(std::move(pc));
    }
    for (const auto& [id, k] : doc.at("keys").items()) {
      PlanKey pk;
      pk.key.preprocessed_digest = k.at("preprocessed_digest").get<std::string>();
      pk.key.residual_flags = k.at("residual_flags").get<std::vector<std::string>>();
      pk.key.language = language_from_string(k.at("language").get<std::string>());
      pk.key.device_context = k.at("device_context").get<std::vector<std::string>>();
      for (const auto& m : k.at("members"))
        pk.members.push_back({m.at("config").get<std::string>(), target_id_from(m.at("target"))});
      pk.configs = k.at("configs").get<std::vector<std::string>>();
      pk.emission_flags = k.at("emission_flags").get<std::vector<std::string>>();
      pk.source = k.at("source").get<std::string>();
      pk.directory = k.at("directory").get<std::string>();
      pk.emission_config = k.at("emission_config").get<std::string>();
      pk.openmp_merged = k.at("openmp_merged").get<bool>();
      pk.arch_bound = k.at("arch_bound").get<bool>();
      plan.keys[id] = std::move(pk);
    }
    plan.core = doc.at("core").get<std::vector<std::string>>();
    plan.deltas = doc.at("deltas").get<std::map<std::string, std::vector<std::string>>>();
    for (const auto& [c, ids] : doc.at("sd_targets").items())
      for (const auto& id : ids)
        plan.sd_targets[c].push_back(target_id_from(id));
    return plan;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Malformed, std::string("plan document: ") + e.what());
  }
}

json to_json(const DedupReport& r) {
  return {{"N", r.N},
          {"T", r.T},
          {"sum_T", r.sum_T},
          {"T_prime", r.T_prime},
          {"reduction", r.reduction},
          {"si_count", r.si_count},
          {"sd_count", r.sd_count},
          {"core_keys", r.core_keys},
          {"delta_keys", r.delta_keys}};
}

} // namespace irforge
