// SPDX-License-Identifier: Apache-2.0
#include "irforge/buildscan.hpp"

#include "irforge/error.hpp"
#include "irforge/io.hpp"
#include "irforge/shell.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace irforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 23> kSeparateArg = {
    "-o",        "-I",        "-isystem", "-iquote",   "-idirafter",    "-include",
    "-imacros",  "-D",        "-U",       "-x",        "-MF",           "-MT",
    "-MQ",       "-Xclang",   "-Xlinker", "-Xpreprocessor", "-Xassembler", "-target",
    "-arch",     "-isysroot", "--sysroot", "-Xcompiler", "-ccbin"};

// Options whose argument is a filesystem path, joined or separate.
constexpr std::array<std::string_view, 7> kPathFlags = {
    "-isystem", "-iquote", "-idirafter", "-include", "-imacros", "-I", "-isysroot"};

constexpr std::array<std::string_view, 12> kJoinedPathPrefixes = {
    "-isystem", "-iquote", "-idirafter", "-include", "-imacros", "-isysroot",
    "-I",       "-L",      "-MF",        "-MT",      "-MQ",      "-B"};

constexpr int kMaxResponseDepth = 4;

[[noreturn]] void malformed(size_t index, const std::string& reason) {
  throw Error(ErrorKind::Malformed,
              "compile database entry " + std::to_string(index) + ": " + reason);
}

std::vector<std::string> expand_response_files(const std::vector<std::string>& args,
                                               const fs::path& directory, int depth,
                                               size_t index) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    if (a.size() < 2 || a[0] != '@') {
      out.push_back(a);
      continue;
    }
    if (depth >= kMaxResponseDepth)
      malformed(index, "response files nested deeper than " +
                           std::to_string(kMaxResponseDepth) + " levels");
    const fs::path rsp = absolute_from(a.substr(1), directory);
    std::string text;
    try {
      text = read_file(rsp);
    } catch (const Error&) {
      malformed(index, "response file " + rsp.string() + " unreadable");
    }
    auto nested = expand_response_files(shell_split(text), directory, depth + 1, index);
    out.insert(out.end(), nested.begin(), nested.end());
  }
  return out;
}

bool path_boundary_after(std::string_view s, size_t pos) {
  return pos == s.size() || s[pos] == '/';
}

} // namespace

bool takes_separate_argument(std::string_view flag) {
  return std::find(kSeparateArg.begin(), kSeparateArg.end(), flag) != kSeparateArg.end();
}

std::string_view to_string(Language lang) {
  switch (lang) {
  case Language::C: return "c";
  case Language::Cxx: return "c++";
  case Language::Cuda: return "cuda";
  case Language::Other: return "other";
  }
  return "other";
}

Language language_from_string(std::string_view name) {
  if (name == "c")
    return Language::C;
  if (name == "c++")
    return Language::Cxx;
  if (name == "cuda")
    return Language::Cuda;
  return Language::Other;
}

Language detect_language(const fs::path& source, const std::vector<std::string>& args) {
  for (size_t i = 0; i < args.size(); ++i) {
    std::string_view lang;
    if (args[i] == "-x" && i + 1 < args.size())
      lang = args[i + 1];
    else if (args[i].starts_with("-x") && args[i].size() > 2 && args[i] != "-xc++-header")
      lang = std::string_view(args[i]).substr(2);
    else
      continue;
    if (lang == "c")
      return Language::C;
    if (lang == "c++")
      return Language::Cxx;
    if (lang == "cuda")
      return Language::Cuda;
    return Language::Other;
  }
  const std::string ext = source.extension().string();
  if (ext == ".c")
    return Language::C;
  if (ext == ".cc" || ext == ".cpp" || ext == ".cxx" || ext == ".C" || ext == ".c++")
    return Language::Cxx;
  if (ext == ".cu")
    return Language::Cuda;
  return Language::Other;
}

std::vector<CompileCommand> parse_compile_db(const json& doc) {
  if (!doc.is_array())
    throw Error(ErrorKind::Malformed, "compile database must be a JSON array");
  std::vector<CompileCommand> out;
  for (size_t i = 0; i < doc.size(); ++i) {
    const json& e = doc[i];
    if (!e.is_object())
      malformed(i, "entry is not an object");
    if (!e.contains("directory"))
      malformed(i, "directory absent");
    if (!e.contains("file"))
      malformed(i, "file absent");
    if (!e["directory"].is_string() || !e["file"].is_string())
      malformed(i, "directory and file must be strings");
    const bool has_cmd = e.contains("command"), has_args = e.contains("arguments");
    if (!has_cmd && !has_args)
      malformed(i, "command and arguments absent");

    CompileCommand cc;
    cc.directory = fs::path(e["directory"].get<std::string>()).lexically_normal();
    std::vector<std::string> args;
    if (has_args) {
      if (!e["arguments"].is_array())
        malformed(i, "arguments must be an array");
      for (const auto& a : e["arguments"]) {
        if (!a.is_string())
          malformed(i, "arguments must be strings");
        args.push_back(a.get<std::string>());
      }
    }
    if (has_cmd) {
      if (!e["command"].is_string())
        malformed(i, "command must be a string");
      std::vector<std::string> split;
      try {
        split = shell_split(e["command"].get<std::string>());
      } catch (const Error& err) {
        malformed(i, err.what());
      }
      if (has_args && split != args)
        throw Error(ErrorKind::AmbiguousEntry,
                    "compile database entry " + std::to_string(i) +
                        ": command and arguments disagree");
      args = std::move(split);
    }
    if (args.empty())
      malformed(i, "empty argument list");
    cc.arguments = expand_response_files(args, cc.directory, 0, i);
    cc.file = absolute_from(e["file"].get<std::string>(), cc.directory);
    if (e.contains("output") && e["output"].is_string())
      cc.output = absolute_from(e["output"].get<std::string>(), cc.directory);
    out.push_back(std::move(cc));
  }
  return out;
}

std::vector<CompileCommand> load_compile_db(const fs::path& path) {
  return parse_compile_db(parse_json(read_file(path), path.string()));
}

std::string rewrite_root(std::string_view token, const fs::path& root) {
  std::string r = root.lexically_normal().string();
  while (r.size() > 1 && r.back() == '/')
    r.pop_back();
  if (r.empty() || r == "/")
    return std::string(token);

  auto boundary_before = [&](size_t pos) {
    if (pos == 0)
      return true;
    const char prev = token[pos - 1];
    if (prev == '=' || prev == ':' || prev == ',')
      return true;
    for (auto prefix : kJoinedPathPrefixes)
      if (pos == prefix.size() && token.starts_with(prefix))
        return true;
    return false;
  };

  std::string out;
  size_t i = 0;
  while (i < token.size()) {
    const size_t hit = token.find(r, i);
    if (hit == std::string_view::npos) {
      out.append(token.substr(i));
      break;
    }
    out.append(token.substr(i, hit - i));
    if (boundary_before(hit) && path_boundary_after(token, hit + r.size())) {
      out.append(kBuildPlaceholder);
    } else {
      out.append(r);
    }
    i = hit + r.size();
  }
  return out;
}

std::string expand_root(std::string_view token, const fs::path& root) {
  std::string r = root.lexically_normal().string();
  while (r.size() > 1 && r.back() == '/')
    r.pop_back();
  std::string out;
  size_t i = 0;
  while (true) {
    const size_t hit = token.find(kBuildPlaceholder, i);
    if (hit == std::string_view::npos) {
      out.append(token.substr(i));
      return out;
    }
    out.append(token.substr(i, hit - i));
    out.append(r);
    i = hit + kBuildPlaceholder.size();
  }
}

std::vector<std::string> canonicalize_flags(const std::vector<std::string>& args,
                                            const fs::path& build_root,
                                            const fs::path& directory,
                                            const fs::path& source) {
  std::vector<std::string> out;
  auto absolutize = [&](const std::string& p) {
    if (directory.empty() || p.empty() || fs::path(p).is_absolute())
      return p;
    return absolute_from(p, directory).string();
  };
  auto is_source = [&](const std::string& tok) {
    if (source.empty())
      return false;
    const fs::path base = directory.empty() ? fs::path("/") : directory;
    return absolute_from(tok, base) == source.lexically_normal() || tok == source.string();
  };

  for (size_t i = 1; i < args.size(); ++i) {
    const std::string& tok = args[i];
    if (tok == "-o") {
      ++i;
      continue;
    }
    if (tok.starts_with("-o") && tok.size() > 2 && !tok.starts_with("-openmp"))
      continue;
    if (takes_separate_argument(tok) && i + 1 < args.size()) {
      std::string arg = args[++i];
      if (std::find(kPathFlags.begin(), kPathFlags.end(), tok) != kPathFlags.end())
        arg = absolutize(arg);
      out.push_back(tok);
      out.push_back(rewrite_root(arg, build_root));
      continue;
    }
    if (!tok.starts_with("-")) {
      if (is_source(tok))
        continue;
      out.push_back(rewrite_root(tok, build_root));
      continue;
    }
    std::string joined = tok;
    for (auto prefix : kPathFlags) {
      if (tok.size() > prefix.size() && tok.starts_with(prefix)) {
        joined = std::string(prefix) + absolutize(tok.substr(prefix.size()));
        break;
      }
    }
    out.push_back(rewrite_root(joined, build_root));
  }
  return out;
}

std::vector<CompilationTarget> extract_targets(const std::vector<CompileCommand>& db,
                                               const fs::path& build_root) {
  std::vector<CompilationTarget> out;
  std::map<TargetId, size_t> seen;
  for (const auto& cc : db) {
    fs::path output;
    for (size_t i = 1; i < cc.arguments.size(); ++i) {
      const auto& a = cc.arguments[i];
      if (a == "-o" && i + 1 < cc.arguments.size())
        output = absolute_from(cc.arguments[i + 1], cc.directory);
      else if (a.starts_with("-o") && a.size() > 2 && !a.starts_with("-openmp"))
        output = absolute_from(a.substr(2), cc.directory);
    }
    if (output.empty())
      output = cc.output ? *cc.output
                         : cc.directory / (cc.file.stem().string() + ".o");

    CompilationTarget t;
    t.id = TargetId{rewrite_root(cc.file.string(), build_root),
                    rewrite_root(output.lexically_normal().string(), build_root)};
    t.flags = canonicalize_flags(cc.arguments, build_root, cc.directory, cc.file);
    t.language = detect_language(cc.file, cc.arguments);
    t.directory = rewrite_root(cc.directory.string(), build_root);

    if (auto it = seen.find(t.id); it != seen.end()) {
      if (out[it->second] == t)
        continue;
      throw Error(ErrorKind::DuplicateTarget,
                  "target " + t.id.str() + " appears twice with different flags");
    }
    seen.emplace(t.id, out.size());
    out.push_back(std::move(t));
  }
  return out;
}

json to_json(const BuildConfiguration& config) {
  json targets = json::array();
  for (const auto& t : config.targets)
    targets.push_back({{"source", t.id.source},
                       {"output", t.id.output},
                       {"directory", t.directory},
                       {"language", to_string(t.language)},
                       {"flags", t.flags}});
  return {{"name", config.name},
          {"assignments", config.assignments},
          {"build_root", config.build_root.string()},
          {"T", config.targets.size()},
          {"targets", targets}};
}

BuildConfiguration configuration_from_json(const json& doc) {
  try {
    BuildConfiguration c;
    c.name = doc.at("name").get<std::string>();
    c.assignments = doc.value("assignments", std::map<std::string, std::string>{});
    c.build_root = doc.at("build_root").get<std::string>();
    for (const auto& t : doc.at("targets")) {
      CompilationTarget ct;
      ct.id = TargetId{t.at("source").get<std::string>(), t.at("output").get<std::string>()};
      ct.directory = t.value("directory", std::string(kBuildPlaceholder));
      ct.language = language_from_string(t.at("language").get<std::string>());
      ct.flags = t.at("flags").get<std::vector<std::string>>();
      c.targets.push_back(std::move(ct));
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Malformed, std::string("scan document: ") + e.what());
  }
}

} // namespace irforge
