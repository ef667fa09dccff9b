// SPDX-License-Identifier: Apache-2.0
#include "irforge/matcher.hpp"

#include "irforge/error.hpp"
#include "irforge/flags.hpp"
#include "irforge/version.hpp"

#include <algorithm>
#include <array>

namespace irforge {

using nlohmann::json;

namespace {

template <class Map>
auto find_folded(const Map& map, const std::string& name) {
  const std::string key = fold_name(name);
  return std::find_if(map.begin(), map.end(),
                      [&](const auto& kv) { return fold_name(kv.first) == key; });
}

bool library_available(const SystemFeatureReport& report, const std::string& name,
                       const std::optional<std::string>& minimum) {
  auto it = find_folded(report.libraries, name);
  if (it == report.libraries.end())
    return false;
  return version_at_least(it->second.version, minimum);
}

std::string join_sorted(std::vector<std::string> values) {
  std::sort(values.begin(), values.end());
  std::string out = "{";
  for (size_t i = 0; i < values.size(); ++i)
    out += (i ? ", " : "") + values[i];
  return out + "}";
}

json opt_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

int point_rank(std::string_view point) {
  const std::string p = fold_name(point);
  if (p == "gpu" || p == "gpu_backend")
    return 0;
  if (p == "vectorization" || p == "simd")
    return 1;
  static const std::array<std::string_view, 9> parallel = {
      "mpi", "openmp", "pthread", "pthreads", "thread_mpi", "tmpi", "openacc", "tbb", "sycl"};
  if (std::find(parallel.begin(), parallel.end(), p) != parallel.end())
    return 2;
  if (p == "fft" || p == "linear_algebra" || p == "blas" || p == "lapack" || p == "mkl" ||
      p.find("fft") != std::string::npos || p.find("blas") != std::string::npos ||
      p.find("lapack") != std::string::npos)
    return 3;
  return 4;
}

bool point_less(std::string_view a, std::string_view b) {
  const int ra = point_rank(a), rb = point_rank(b);
  if (ra != rb)
    return ra < rb;
  return a < b;
}

CommonSpecialization intersect(const SpecializationCatalog& catalog,
                               const SystemFeatureReport& features,
                               const VectorLevelTable& table) {
  CommonSpecialization common;
  auto& gpu_opts = common.point_options["gpu"];
  auto& simd_opts = common.point_options["vectorization"];

  for (const auto& [name, option] : catalog.gpu_backends) {
    auto it = find_folded(features.gpu_backends, name);
    if (it == features.gpu_backends.end())
      continue;
    if (!version_at_least(it->second.version, option.minimum_version))
      continue;
    common.gpu_backends[name] = CommonGpuBackend{it->second.version, option.build_flag};
    gpu_opts.push_back(name);
    if (option.used_as_default)
      common.defaults["gpu"] = name;
  }
  common.gpu_mandatory = catalog.gpu_build && catalog.gpu_build->value;

  std::map<std::string, std::optional<std::string>> fallbacks;
  std::optional<std::string> fallback_default;
  for (const auto& [name, level] : catalog.simd_vectorization) {
    const VectorLevel* known = table.find(name);
    if (!known) {
      common.warnings.push_back("vectorization level '" + name +
                                "' is unknown to the level table; dropped");
      continue;
    }
    if (known->fallback) {
      fallbacks[name] = level.build_flag;
      if (level.is_default)
        fallback_default = name;
      continue;
    }
    if (!VectorLevelTable::supported(*known, features.cpu.vector_features))
      continue;
    common.vectorization_flags[name] = level.build_flag;
    if (level.is_default)
      common.defaults["vectorization"] = name;
  }
  // Requirement-free levels only matter when no hardware-backed level runs.
  if (common.vectorization_flags.empty()) {
    common.vectorization_flags = fallbacks;
    if (fallback_default)
      common.defaults["vectorization"] = *fallback_default;
  }
  for (const auto& [name, flag] : common.vectorization_flags)
    simd_opts.push_back(name);

  for (const auto& [name, option] : catalog.parallel_programming_libraries) {
    if (!library_available(features, name, option.minimum_version))
      continue;
    common.parallel[name] = option.build_flag;
    const std::string point = fold_name(name);
    common.point_options[point] = {"off", "on"};
    if (option.used_as_default)
      common.defaults[point] = "on";
  }

  if (!catalog.linear_algebra_libraries.empty()) {
    auto& opts = common.point_options["linear_algebra"];
    for (const auto& [name, option] : catalog.linear_algebra_libraries) {
      if (!library_available(features, name, std::nullopt))
        continue;
      common.libraries[name] = option.build_flag;
      opts.push_back(name);
      if (option.used_as_default)
        common.defaults["linear_algebra"] = name;
    }
  }
  if (!catalog.fft_libraries.empty()) {
    auto& opts = common.point_options["fft"];
    for (const auto& [name, option] : catalog.fft_libraries) {
      if (!option.built_in.value_or(false) && !library_available(features, name, std::nullopt))
        continue;
      common.libraries[name] = option.build_flag;
      opts.push_back(name);
      if (option.used_as_default)
        common.defaults["fft"] = name;
    }
  }
  for (const auto& [name, option] : catalog.other_external_libraries) {
    const auto minimum = option.version.empty() ? std::nullopt
                                                : std::optional<std::string>(option.version);
    if (!library_available(features, name, minimum))
      continue;
    common.libraries[name] = option.build_flag;
    const std::string point = fold_name(name);
    if (!common.point_options.contains(point))
      common.point_options[point] = {"off", "on"};
    if (option.used_as_default)
      common.defaults[point] = "on";
  }
  return common;
}

json to_json(const CommonSpecialization& common) {
  json body = json::object();
  json vec = json::object();
  for (const auto& [name, flag] : common.vectorization_flags)
    vec[name] = opt_json(flag);
  body["vectorization_flags"] = vec;
  json gpus = json::object();
  for (const auto& [name, g] : common.gpu_backends)
    gpus[name] = {{"version", opt_json(g.version)}, {"flag", opt_json(g.flag)}};
  body["gpu_backends"] = gpus;
  auto flag_map = [](const std::map<std::string, std::optional<std::string>>& m) {
    json out = json::object();
    for (const auto& [name, flag] : m)
      out[name] = opt_json(flag);
    return out;
  };
  if (!common.parallel.empty())
    body["parallel"] = flag_map(common.parallel);
  if (!common.libraries.empty())
    body["libraries"] = flag_map(common.libraries);
  return {{"common_specialization", body}};
}

std::string_view to_string(Provenance p) {
  switch (p) {
  case Provenance::User: return "user";
  case Provenance::Operator: return "operator";
  case Provenance::Default: return "default";
  }
  return "default";
}

std::vector<std::pair<std::string, std::string>> ResolvedConfig::pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& a : assignments)
    out.emplace_back(a.point, a.value);
  return out;
}

namespace {

std::string canonical_point(const std::string& raw) {
  std::string p = fold_name(raw);
  if (p == "simd")
    return "vectorization";
  return p;
}

std::optional<std::string> match_value(const std::string& point,
                                       const std::vector<std::string>& options,
                                       const std::string& value) {
  for (const auto& opt : options) {
    const bool same = point == "vectorization" ? fold_level(opt) == fold_level(value)
                                               : fold_name(opt) == fold_name(value);
    if (same)
      return opt;
  }
  return std::nullopt;
}

} // namespace

ResolvedConfig resolve(const CommonSpecialization& common, const Selection& choices,
                       const std::optional<Selection>& operator_prefs) {
  std::map<std::string, std::string> user;
  for (const auto& [raw_point, value] : choices) {
    const std::string point = canonical_point(raw_point);
    auto it = common.point_options.find(point);
    if (it == common.point_options.end()) {
      std::vector<std::string> known;
      for (const auto& [p, _] : common.point_options)
        known.push_back(p);
      throw Error(ErrorKind::UnknownPoint, "unknown specialization point '" + raw_point +
                                               "'; available points: " + join_sorted(known));
    }
    auto matched = match_value(point, it->second, value);
    if (!matched)
      throw Error(ErrorKind::UnsupportedValue, "value '" + value + "' for point '" + point +
                                                   "' is not supported here; available: " +
                                                   join_sorted(it->second));
    user[point] = *matched;
  }

  std::map<std::string, std::string> op;
  if (operator_prefs) {
    for (const auto& [raw_point, value] : *operator_prefs) {
      const std::string point = canonical_point(raw_point);
      auto it = common.point_options.find(point);
      if (it == common.point_options.end())
        continue;
      if (auto matched = match_value(point, it->second, value))
        op[point] = *matched;
    }
  }

  ResolvedConfig resolved;
  for (const auto& [point, options] : common.point_options) {
    if (auto u = user.find(point); u != user.end()) {
      resolved.assignments.push_back({point, u->second, Provenance::User});
    } else if (auto o = op.find(point); o != op.end()) {
      resolved.assignments.push_back({point, o->second, Provenance::Operator});
    } else if (auto d = common.defaults.find(point); d != common.defaults.end()) {
      resolved.assignments.push_back({point, d->second, Provenance::Default});
    } else if (options.size() == 1 && options.front() != "off") {
      resolved.assignments.push_back({point, options.front(), Provenance::Default});
    } else if (point == "gpu" && common.gpu_mandatory && !options.empty()) {
      throw Error(ErrorKind::UnresolvedMandatory,
                  "a GPU backend must be selected; available: " + join_sorted(options));
    }
  }
  std::stable_sort(resolved.assignments.begin(), resolved.assignments.end(),
                   [](const Assignment& a, const Assignment& b) {
                     return point_less(a.point, b.point);
                   });
  return resolved;
}

json to_json(const ResolvedConfig& resolved) {
  json list = json::array();
  for (const auto& a : resolved.assignments)
    list.push_back({{"point", a.point}, {"value", a.value}, {"provenance", to_string(a.provenance)}});
  return {{"assignments", list}};
}

} // namespace irforge
