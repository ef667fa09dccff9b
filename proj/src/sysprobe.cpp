// SPDX-License-Identifier: Apache-2.0
#include "irforge/sysprobe.hpp"

#include "irforge/error.hpp"
#include "irforge/flags.hpp"
#include "irforge/io.hpp"
#include "irforge/process.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include <sys/utsname.h>

namespace irforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string_view origin_name(LibraryOrigin o) {
  switch (o) {
  case LibraryOrigin::Probed: return "probed";
  case LibraryOrigin::Inferred: return "inferred";
  case LibraryOrigin::Declared: return "declared";
  }
  return "declared";
}

LibraryOrigin origin_from(const std::string& s) {
  if (s == "probed") return LibraryOrigin::Probed;
  if (s == "inferred") return LibraryOrigin::Inferred;
  if (s == "declared") return LibraryOrigin::Declared;
  throw Error(ErrorKind::MalformedBundle, "unknown library origin '" + s + "'");
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::MalformedBundle, "probe bundle: " + what);
}

const json* member(const json& obj, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (auto it = obj.find(n); it != obj.end())
      return &*it;
  return nullptr;
}

std::optional<std::string> opt_text(const json& obj, std::initializer_list<const char*> names,
                                    const std::string& where) {
  const json* v = member(obj, names);
  if (!v || v->is_null())
    return std::nullopt;
  if (v->is_string())
    return v->get<std::string>();
  if (v->is_number())
    return v->dump();
  malformed(where + " must be a string");
}

fs::path under(const fs::path& root, const fs::path& abs) {
  return root / abs.relative_path();
}

std::vector<std::string> find_libs(const std::vector<fs::path>& dirs, const std::string& stem) {
  std::vector<std::string> found;
  for (const auto& dir : dirs) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
      continue;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      const std::string name = entry.path().filename().string();
      if (name.starts_with(stem + ".so"))
        found.push_back(entry.path().string());
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

std::optional<std::string> cuda_version(const fs::path& root) {
  const fs::path json_path = under(root, "/usr/local/cuda/version.json");
  std::error_code ec;
  if (fs::exists(json_path, ec)) {
    try {
      auto doc = json::parse(read_file(json_path));
      if (auto it = doc.find("cuda"); it != doc.end() && it->contains("version"))
        return (*it)["version"].get<std::string>();
    } catch (const std::exception&) {
    }
  }
  const fs::path txt = under(root, "/usr/local/cuda/version.txt");
  if (fs::exists(txt, ec)) {
    std::smatch m;
    const std::string content = read_file(txt);
    if (std::regex_search(content, m, std::regex(R"(CUDA Version\s+([0-9.]+))")))
      return m[1].str();
  }
  return std::nullopt;
}

std::optional<std::string> first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  if (in && std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.pop_back();
    return line;
  }
  return std::nullopt;
}

} // namespace

SystemFeatureReport probe_live(const ProbeEnvironment& env) {
  SystemFeatureReport report;

  const fs::path cpuinfo = under(env.root, "/proc/cpuinfo");
  std::ifstream in(cpuinfo);
  if (!in)
    throw Error(ErrorKind::ProbeUnavailable,
                "live probing needs " + cpuinfo.string() + " (unsupported host)");
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      continue;
    std::string key = line.substr(0, colon);
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key != "flags" && key != "Features")
      continue;
    std::istringstream tokens(line.substr(colon + 1));
    std::string token;
    while (tokens >> token)
      report.cpu.vector_features.insert(lower(token));
    break;
  }

  if (env.machine) {
    report.cpu.architecture = *env.machine;
  } else if (env.root == "/") {
    utsname u{};
    if (::uname(&u) == 0)
      report.cpu.architecture = u.machine;
  }

  std::vector<fs::path> dirs;
  for (const char* d : {"/usr/lib/x86_64-linux-gnu", "/usr/lib/aarch64-linux-gnu", "/usr/lib64",
                        "/usr/lib", "/usr/local/lib", "/usr/local/cuda/lib64",
                        "/opt/rocm/lib", "/usr/lib/wsl/lib"})
    dirs.push_back(under(env.root, d));
  dirs.insert(dirs.end(), env.extra_library_dirs.begin(), env.extra_library_dirs.end());

  if (auto libs = find_libs(dirs, "libcuda"); !libs.empty())
    report.gpu_backends["CUDA"] = GpuBackendInfo{cuda_version(env.root), libs, {}, {}};
  if (auto libs = find_libs(dirs, "libamdhip64"); !libs.empty())
    report.gpu_backends["ROCm"] =
        GpuBackendInfo{first_line(under(env.root, "/opt/rocm/.info/version")), libs, {}, {}};
  if (auto libs = find_libs(dirs, "libOpenCL"); !libs.empty())
    report.gpu_backends["OpenCL"] = GpuBackendInfo{std::nullopt, libs, {}, {}};

  const std::pair<const char*, const char*> known_libs[] = {
      {"libfftw3", "fftw3"},     {"libmkl_rt", "MKL"},       {"libopenblas", "OpenBLAS"},
      {"liblapack", "LAPACK"},   {"libblas", "BLAS"},        {"libscalapack", "ScaLAPACK"},
      {"libmpi", "MPI"},         {"libgomp", "OpenMP"},      {"libomp", "OpenMP"}};
  for (const auto& [stem, name] : known_libs)
    if (!find_libs(dirs, stem).empty())
      report.libraries[name] = LibraryInfo{std::nullopt, LibraryOrigin::Probed, std::nullopt};

  if (env.probe_toolchains && env.root == "/") {
    for (const char* cc : {"gcc", "clang", "icx", "nvcc"}) {
      if (find_program(cc).empty())
        continue;
      auto res = run_process({cc, "-dumpversion"});
      if (res.exit_code == 0) {
        std::string v = res.out;
        v.erase(v.find_last_not_of(" \r\n\t") + 1);
        report.toolchains[cc] = ToolchainInfo{v};
      }
    }
  }
  return report;
}

SystemFeatureReport parse_bundle(const json& bundle) {
  if (!bundle.is_object())
    malformed("top level must be an object");
  SystemFeatureReport report;

  if (const json* cpu = member(bundle, {"cpu", "CPU Info"})) {
    if (!cpu->is_object())
      malformed("CPU section must be an object");
    if (auto arch = opt_text(*cpu, {"architecture", "Architecture"}, "cpu architecture");
        arch && !arch->empty())
      report.cpu.architecture = *arch;
    if (const json* feats = member(*cpu, {"vector_features", "Vectorization"})) {
      if (!feats->is_array())
        malformed("vector features must be a list");
      for (const auto& f : *feats) {
        if (!f.is_string())
          malformed("vector feature tokens must be strings");
        report.cpu.vector_features.insert(lower(f.get<std::string>()));
      }
    }
  }

  if (const json* gpus = member(bundle, {"gpu_backends", "GPU Backends"})) {
    if (!gpus->is_object())
      malformed("GPU section must be an object");
    for (const auto& [name, entry] : gpus->items()) {
      if (!entry.is_object())
        malformed("GPU backend '" + name + "' must be an object");
      GpuBackendInfo info;
      info.version = opt_text(entry, {"version"}, name + " version");
      if (const json* libs = member(entry, {"libraries", "lib"})) {
        if (libs->is_string())
          info.libraries.push_back(libs->get<std::string>());
        else if (libs->is_array())
          for (const auto& l : *libs)
            info.libraries.push_back(l.get<std::string>());
        else
          malformed("GPU backend '" + name + "' libraries must be a list");
      }
      info.driver_version = opt_text(entry, {"driver_version"}, name + " driver_version");
      info.device_capability =
          opt_text(entry, {"device_capability"}, name + " device_capability");
      report.gpu_backends[name] = std::move(info);
    }
  }

  if (const json* libs = member(bundle, {"libraries", "Libraries"})) {
    if (!libs->is_object())
      malformed("libraries must be an object");
    for (const auto& [name, entry] : libs->items()) {
      LibraryInfo info;
      if (entry.is_string()) {
        info.version = entry.get<std::string>();
      } else if (entry.is_object()) {
        info.version = opt_text(entry, {"version"}, name + " version");
        if (auto o = opt_text(entry, {"origin"}, name + " origin"))
          info.origin = origin_from(*o);
        info.inferred_from = opt_text(entry, {"inferred_from"}, name + " inferred_from");
      } else if (!entry.is_null()) {
        malformed("library '" + name + "' must be an object");
      }
      report.libraries[name] = std::move(info);
    }
  }

  if (const json* tcs = member(bundle, {"toolchains", "Toolchains", "Compilers"})) {
    if (!tcs->is_object())
      malformed("toolchains must be an object");
    for (const auto& [name, entry] : tcs->items()) {
      ToolchainInfo info;
      if (entry.is_string())
        info.version = entry.get<std::string>();
      else if (entry.is_object())
        info.version = opt_text(entry, {"version"}, name + " version");
      report.toolchains[name] = std::move(info);
    }
  }
  return report;
}

void apply_inference(SystemFeatureReport& report) {
  for (const auto& [name, info] : report.gpu_backends) {
    const std::string key = fold_name(name);
    const char* implied = nullptr;
    if (key == "cuda")
      implied = "cuFFT";
    else if (key == "rocm" || key == "hip")
      implied = "rocFFT";
    if (!implied || report.libraries.contains(implied))
      continue;
    report.libraries[implied] =
        LibraryInfo{std::nullopt, LibraryOrigin::Inferred, "gpu_backends/" + name};
  }
}

SystemFeatureReport discover_system(const std::optional<json>& bundle, bool live,
                                    const ProbeEnvironment& env) {
  SystemFeatureReport report;
  if (live)
    report = probe_live(env);
  if (bundle) {
    SystemFeatureReport declared = parse_bundle(*bundle);
    if (declared.cpu.architecture != "unknown")
      report.cpu.architecture = declared.cpu.architecture;
    if (!declared.cpu.vector_features.empty())
      report.cpu.vector_features = declared.cpu.vector_features;
    for (auto& [name, info] : declared.gpu_backends) {
      if (auto it = report.gpu_backends.find(name);
          it != report.gpu_backends.end() && it->second.version != info.version)
        report.warnings.push_back("gpu_backends/" + name + ": declared version " +
                                  info.version.value_or("(none)") + " overrides probed " +
                                  it->second.version.value_or("(none)"));
      report.gpu_backends[name] = std::move(info);
    }
    for (auto& [name, info] : declared.libraries) {
      if (auto it = report.libraries.find(name);
          it != report.libraries.end() && it->second.version != info.version)
        report.warnings.push_back("libraries/" + name + ": declared version " +
                                  info.version.value_or("(none)") + " overrides probed " +
                                  it->second.version.value_or("(none)"));
      report.libraries[name] = std::move(info);
    }
    for (auto& [name, info] : declared.toolchains) {
      if (auto it = report.toolchains.find(name);
          it != report.toolchains.end() && it->second.version != info.version)
        report.warnings.push_back("toolchains/" + name + ": declared version " +
                                  info.version.value_or("(none)") + " overrides probed " +
                                  it->second.version.value_or("(none)"));
      report.toolchains[name] = std::move(info);
    }
  }
  apply_inference(report);
  return report;
}

json to_json(const SystemFeatureReport& r) {
  auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
  json gpus = json::object();
  for (const auto& [name, g] : r.gpu_backends) {
    json e = {{"version", opt(g.version)}, {"libraries", g.libraries}};
    if (g.driver_version)
      e["driver_version"] = *g.driver_version;
    if (g.device_capability)
      e["device_capability"] = *g.device_capability;
    gpus[name] = e;
  }
  json libs = json::object();
  for (const auto& [name, l] : r.libraries) {
    json e = {{"version", opt(l.version)}, {"origin", origin_name(l.origin)}};
    if (l.inferred_from)
      e["inferred_from"] = *l.inferred_from;
    libs[name] = e;
  }
  json tcs = json::object();
  for (const auto& [name, t] : r.toolchains)
    tcs[name] = {{"version", opt(t.version)}};
  return {{"cpu", {{"architecture", r.cpu.architecture},
                   {"vector_features", r.cpu.vector_features}}},
          {"gpu_backends", gpus},
          {"libraries", libs},
          {"toolchains", tcs},
          {"warnings", r.warnings}};
}

} // namespace irforge
