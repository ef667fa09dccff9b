// SPDX-License-Identifier: Apache-2.0
#include "irforge/driver.hpp"

#include "irforge/error.hpp"
#include "irforge/io.hpp"

#include <regex>

namespace irforge {

using nlohmann::json;

namespace {

constexpr std::pair<Capability, std::string_view> kCapNames[] = {
    {Capability::Preprocess, "preprocess"}, {Capability::EmitIr, "emit_ir"},
    {Capability::EmitIrText, "emit_ir_text"}, {Capability::Lower, "lower"},
    {Capability::Link, "link"}};

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::InvalidTemplate, what);
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

json toml_string(std::string_view raw, size_t line) {
  try {
    return json::parse(raw); // basic TOML strings share JSON escapes
  } catch (const json::exception&) {
    throw Error(ErrorKind::SyntaxError,
                "driver TOML line " + std::to_string(line) + ": bad value");
  }
}

} // namespace

std::string_view to_string(Capability cap) {
  for (const auto& [c, n] : kCapNames)
    if (c == cap)
      return n;
  return "unknown";
}

void ToolchainDriver::set_template(Capability cap, CommandTemplate tmpl) {
  static const std::regex slot(R"(\{([^{}]*)\})");
  if (tmpl.tokens.empty())
    invalid(std::string(to_string(cap)) + " template is empty");
  for (const auto& tok : tmpl.tokens) {
    for (std::sregex_iterator it(tok.begin(), tok.end(), slot), end; it != end; ++it) {
      const std::string name = (*it)[1].str();
      if (name != "flags" && name != "input" && name != "output")
        invalid(std::string(to_string(cap)) + " template uses unknown slot {" + name + "}");
      if (name == "flags" && tok != "{flags}")
        invalid(std::string(to_string(cap)) + " template must use {flags} as a whole token");
    }
  }
  templates_[cap] = std::move(tmpl);
}

bool ToolchainDriver::can_emit_ir(Language lang) const {
  return has(Capability::EmitIr) && ir_languages_.contains(lang);
}

std::vector<std::string> ToolchainDriver::render(Capability cap,
                                                 const std::vector<std::string>& flags,
                                                 const std::optional<std::string>& input,
                                                 const std::optional<std::string>& output) const {
  auto it = templates_.find(cap);
  if (it == templates_.end())
    invalid("driver '" + name_ + "' has no " + std::string(to_string(cap)) + " capability");
  std::vector<std::string> argv;
  for (const auto& tok : it->second.tokens) {
    if (tok == "{flags}") {
      argv.insert(argv.end(), flags.begin(), flags.end());
      continue;
    }
    std::string t = tok;
    if (t.find("{input}") != std::string::npos) {
      if (!input)
        invalid(std::string(to_string(cap)) + " template slot {input} left unsubstituted");
      t = replace_all(t, "{input}", *input);
    }
    if (t.find("{output}") != std::string::npos) {
      if (!output)
        invalid(std::string(to_string(cap)) + " template slot {output} left unsubstituted");
      t = replace_all(t, "{output}", *output);
    }
    argv.push_back(std::move(t));
  }
  return argv;
}

ProcessResult ToolchainDriver::run(Capability cap, const std::vector<std::string>& flags,
                                   const std::string& input, const std::string& output,
                                   const std::filesystem::path& cwd,
                                   const std::string& unit) const {
  auto res = run_process(render(cap, flags, input, output), cwd);
  if (res.exit_code != 0)
    throw DriverError(unit, res.err);
  return res;
}

ToolchainDriver ToolchainDriver::builtin_clang(const std::string& cc) {
  ToolchainDriver d;
  d.name_ = "clang";
  d.set_template(Capability::Preprocess, {{cc, "{flags}", "-E", "{input}", "-o", "{output}"}});
  d.set_template(Capability::EmitIr, {{cc, "{flags}", "-c", "-emit-llvm", "-Xclang",
                                       "-disable-llvm-passes", "{input}", "-o", "{output}"}});
  d.set_template(Capability::EmitIrText, {{cc, "{flags}", "-S", "-emit-llvm", "-Xclang",
                                           "-disable-llvm-passes", "{input}", "-o", "{output}"}});
  d.set_template(Capability::Lower, {{cc, "{flags}", "-Wno-unused-command-line-argument", "-c",
                                      "{input}", "-o", "{output}"}});
  d.set_template(Capability::Link, {{"cmake", "--build", "{input}", "{flags}"}});
  d.ir_languages_ = {Language::C, Language::Cxx};
  return d;
}

ToolchainDriver ToolchainDriver::from_json(const json& doc) {
  if (!doc.is_object())
    invalid("driver description must be an object");
  ToolchainDriver d;
  d.name_ = doc.value("name", std::string("custom"));
  for (const auto& [cap, name] : kCapNames) {
    auto it = doc.find(std::string(name));
    if (it == doc.end())
      continue;
    if (!it->is_array())
      invalid(std::string(name) + " must be a token array");
    CommandTemplate t;
    for (const auto& tok : *it)
      t.tokens.push_back(tok.get<std::string>());
    d.set_template(cap, std::move(t));
  }
  for (const auto& lang : doc.value("ir_languages", std::vector<std::string>{"c", "c++"}))
    d.ir_languages_.insert(language_from_string(lang));
  d.ir_languages_.erase(Language::Other);
  return d;
}

ToolchainDriver ToolchainDriver::from_spec(std::string_view spec) {
  if (spec == "clang")
    return builtin_clang();
  if (spec.starts_with("clang:"))
    return builtin_clang(std::string(spec.substr(6)));
  const std::filesystem::path path(spec);
  const std::string text = read_file(path);
  if (path.extension() == ".toml")
    return from_json(parse_flat_toml(text));
  return from_json(parse_json(text, path.string()));
}

json ToolchainDriver::to_json() const {
  json doc = {{"name", name_}};
  for (const auto& [cap, tmpl] : templates_)
    doc[std::string(irforge::to_string(cap))] = tmpl.tokens;
  json langs = json::array();
  for (auto l : ir_languages_)
    langs.push_back(irforge::to_string(l));
  doc["ir_languages"] = langs;
  return doc;
}

json parse_flat_toml(std::string_view text) {
  json doc = json::object();
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    std::string line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#')
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::SyntaxError,
                  "driver TOML line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.starts_with("[")) {
      const json arr = toml_string(value, line_no);
      if (!arr.is_array())
        throw Error(ErrorKind::SyntaxError,
                    "driver TOML line " + std::to_string(line_no) + ": bad array");
      doc[key] = arr;
    } else {
      doc[key] = toml_string(value, line_no);
    }
  }
  return doc;
}

} // namespace irforge
