// SPDX-License-Identifier: Apache-2.0
#include "irforge/catalog.hpp"

#include "irforge/error.hpp"
#include "irforge/flags.hpp"
#include "irforge/io.hpp"
#include "irforge/schema.hpp"

namespace irforge {

using nlohmann::json;

namespace {

class Reader {
public:
  Reader(SpecializationCatalog& catalog, CatalogOptions options)
      : catalog_(catalog), options_(options) {}

  std::optional<std::string> text(const json& obj, const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
      return std::nullopt;
    if (it->is_string())
      return it->get<std::string>();
    return it->dump();
  }

  std::string text_or_empty(const json& obj, const char* key) const {
    return text(obj, key).value_or("");
  }

  bool boolean(const json& obj, const char* key) const {
    auto it = obj.find(key);
    return it != obj.end() && it->is_boolean() && it->get<bool>();
  }

  std::optional<std::string> flag(const json& obj, const char* key,
                                  const std::string& where) {
    auto raw = text(obj, key);
    if (!raw)
      return std::nullopt;
    return canonical(*raw, where + "/" + key);
  }

  std::string canonical(const std::string& raw, const std::string& where) {
    if (!options_.normalize_flags)
      return raw;
    try {
      return normalize_flag(raw).raw;
    } catch (const Error& e) {
      catalog_.diagnostics.push_back("non-canonical flag at " + where + ": " + e.what());
      return raw;
    }
  }

  template <class Entry, class Fn>
  std::map<std::string, Entry> section(const json& doc, const char* name, Fn&& read) {
    std::map<std::string, Entry> out;
    auto it = doc.find(name);
    if (it == doc.end() || !it->is_object())
      return out;
    for (const auto& [key, value] : it->items()) {
      const std::string where = std::string("/") + name + "/" + pointer_token(key);
      if (key.empty())
        catalog_.diagnostics.push_back(std::string("empty name in ") + name);
      out.emplace(key, read(value, where));
    }
    return out;
  }

  std::vector<std::string> flag_list(const json& doc, const char* name) {
    std::vector<std::string> out;
    auto it = doc.find(name);
    if (it == doc.end() || !it->is_array())
      return out;
    for (std::size_t i = 0; i < it->size(); ++i)
      out.push_back(canonical((*it)[i].get<std::string>(),
                              std::string("/") + name + "/" + std::to_string(i)));
    return out;
  }

private:
  SpecializationCatalog& catalog_;
  CatalogOptions options_;
};

template <class Map, class Pred>
void check_single_default(SpecializationCatalog& c, const Map& map, const char* name,
                          Pred is_default) {
  int defaults = 0;
  for (const auto& [_, entry] : map)
    defaults += is_default(entry) ? 1 : 0;
  if (defaults > 1)
    c.diagnostics.push_back(std::string(name) + " has " + std::to_string(defaults) +
                            " entries marked as default");
}

json nullable(const std::optional<std::string>& v) {
  return v ? json(*v) : json(nullptr);
}

} // namespace

SpecializationCatalog validate_catalog(std::string_view document, CatalogOptions options) {
  return validate_catalog(parse_json(document, "catalog"), options);
}

SpecializationCatalog validate_catalog(const json& doc, CatalogOptions options) {
  if (auto violations = JsonSchema::catalog().validate(doc); !violations.empty())
    throw SchemaError(std::move(violations));

  SpecializationCatalog c;
  Reader r(c, options);

  const json& gpu = doc.at("gpu_build");
  c.gpu_build = GpuBuild{gpu.at("value").get<bool>(), r.flag(gpu, "build_flag", "/gpu_build")};

  auto versioned = [&](const json& e, const std::string& where) {
    return VersionedOption{r.boolean(e, "used_as_default"), r.flag(e, "build_flag", where),
                           r.text(e, "minimum_version")};
  };
  c.gpu_backends = r.section<VersionedOption>(doc, "gpu_backends", versioned);
  c.parallel_programming_libraries =
      r.section<VersionedOption>(doc, "parallel_programming_libraries", versioned);
  c.linear_algebra_libraries = r.section<LinearAlgebraOption>(
      doc, "linear_algebra_libraries", [&](const json& e, const std::string& where) {
        return LinearAlgebraOption{r.boolean(e, "used_as_default"),
                                   r.flag(e, "build_flag", where), r.text(e, "condition")};
      });
  c.fft_libraries = r.section<FftOption>(
      doc, "FFT_libraries", [&](const json& e, const std::string& where) {
        FftOption o;
        if (auto it = e.find("built-in"); it != e.end() && it->is_boolean())
          o.built_in = it->get<bool>();
        o.used_as_default = r.boolean(e, "used_as_default");
        o.dependencies = r.text(e, "dependencies");
        o.build_flag = r.flag(e, "build_flag", where);
        o.condition = r.text(e, "condition");
        return o;
      });
  c.other_external_libraries = r.section<ExternalLibrary>(
      doc, "other_external_libraries", [&](const json& e, const std::string& where) {
        return ExternalLibrary{r.text_or_empty(e, "version"), r.boolean(e, "used_as_default"),
                               r.text_or_empty(e, "conditions"),
                               r.flag(e, "build_flag", where)};
      });
  c.compiler_flags = r.flag_list(doc, "compiler_flags");
  c.optimization_build_flags = r.flag_list(doc, "optimization_build_flags");
  c.compilers = r.section<CompilerRequirement>(
      doc, "compilers", [&](const json& e, const std::string&) {
        return CompilerRequirement{r.text_or_empty(e, "minimum_version")};
      });
  c.architectures = doc.at("architectures").get<std::vector<std::string>>();
  c.simd_vectorization = r.section<SimdLevel>(
      doc, "simd_vectorization", [&](const json& e, const std::string& where) {
        return SimdLevel{r.flag(e, "build_flag", where), r.boolean(e, "default")};
      });
  const json& bs = doc.at("build_system");
  c.build_system = BuildSystem{bs.at("type").get<std::string>(),
                               bs.at("minimum_version").get<std::string>()};
  const json& ib = doc.at("internal_build");
  c.internal_build = InternalBuild{ib.at("library_name").get<std::string>(),
                                   r.flag(ib, "build_flag", "/internal_build")};

  check_single_default(c, c.gpu_backends, "gpu_backends",
                       [](const auto& e) { return e.used_as_default; });
  check_single_default(c, c.linear_algebra_libraries, "linear_algebra_libraries",
                       [](const auto& e) { return e.used_as_default; });
  check_single_default(c, c.fft_libraries, "FFT_libraries",
                       [](const auto& e) { return e.used_as_default; });
  check_single_default(c, c.simd_vectorization, "simd_vectorization",
                       [](const auto& e) { return e.is_default; });
  return c;
}

json to_json(const SpecializationCatalog& c) {
  json doc = json::object();
  const GpuBuild gpu = c.gpu_build.value_or(GpuBuild{});
  doc["gpu_build"] = {{"value", gpu.value}, {"build_flag", nullable(gpu.build_flag)}};

  auto versioned = [](const std::map<std::string, VersionedOption>& m) {
    json out = json::object();
    for (const auto& [name, e] : m)
      out[name] = {{"used_as_default", e.used_as_default},
                   {"build_flag", nullable(e.build_flag)},
                   {"minimum_version", nullable(e.minimum_version)}};
    return out;
  };
  doc["gpu_backends"] = versioned(c.gpu_backends);
  doc["parallel_programming_libraries"] = versioned(c.parallel_programming_libraries);

  json la = json::object();
  for (const auto& [name, e] : c.linear_algebra_libraries)
    la[name] = {{"used_as_default", e.used_as_default},
                {"build_flag", nullable(e.build_flag)},
                {"condition", nullable(e.condition)}};
  doc["linear_algebra_libraries"] = la;

  json fft = json::object();
  for (const auto& [name, e] : c.fft_libraries) {
    json entry = {{"used_as_default", e.used_as_default},
                  {"dependencies", nullable(e.dependencies)},
                  {"build_flag", nullable(e.build_flag)},
                  {"condition", nullable(e.condition)}};
    if (e.built_in)
      entry["built-in"] = *e.built_in;
    fft[name] = entry;
  }
  doc["FFT_libraries"] = fft;

  json other = json::object();
  for (const auto& [name, e] : c.other_external_libraries)
    other[name] = {{"version", e.version},
                   {"used_as_default", e.used_as_default},
                   {"conditions", e.conditions},
                   {"build_flag", nullable(e.build_flag)}};
  doc["other_external_libraries"] = other;

  doc["compiler_flags"] = c.compiler_flags;
  doc["optimization_build_flags"] = c.optimization_build_flags;
  json compilers = json::object();
  for (const auto& [name, e] : c.compilers)
    compilers[name] = {{"minimum_version", e.minimum_version}};
  doc["compilers"] = compilers;
  doc["architectures"] = c.architectures;
  json simd = json::object();
  for (const auto& [name, e] : c.simd_vectorization)
    simd[name] = {{"build_flag", nullable(e.build_flag)}, {"default", e.is_default}};
  doc["simd_vectorization"] = simd;
  doc["build_system"] = {{"type", c.build_system.type},
                         {"minimum_version", c.build_system.minimum_version}};
  doc["internal_build"] = {{"library_name", c.internal_build.library_name},
                           {"build_flag", nullable(c.internal_build.build_flag)}};
  return doc;
}

} // namespace irforge
