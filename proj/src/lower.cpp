// SPDX-License-Identifier: Apache-2.0
#include "irforge/lower.hpp"

#include "irforge/dedup.hpp"
#include "irforge/error.hpp"
#include "irforge/io.hpp"

#include <regex>

namespace irforge {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTargetAttrs[] = {"target-cpu", "target-features", "tune-cpu"};

const std::regex& attr_regex() {
  static const std::regex re(R"re( ?"(target-cpu|target-features|tune-cpu)"="([^"]*)")re");
  return re;
}

bool is_attribute_group(std::string_view line) { return line.starts_with("attributes #"); }

} // namespace

TargetAttributes probe_target_attributes(const ToolchainDriver& driver,
                                         const std::vector<std::string>& flags,
                                         Language language) {
  TempDir tmp("irforge-probe");
  const fs::path src = tmp.path() / (language == Language::C ? "probe.c" : "probe.cpp");
  write_file_atomic(src, "void irforge_probe(void) {}\n");
  const fs::path out = tmp.path() / "probe.ll";
  driver.run(Capability::EmitIrText, codegen_flags(flags), src.string(), out.string(),
             tmp.path(), "target attribute probe");
  const std::string text = read_file(out);
  TargetAttributes attrs;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos)
      nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!is_attribute_group(line) || line.find("\"target-cpu\"") == std::string::npos)
      continue;
    for (std::sregex_iterator it(line.begin(), line.end(), attr_regex()), end; it != end; ++it)
      attrs[(*it)[1].str()] = (*it)[2].str();
    break;
  }
  return attrs;
}

std::string rewrite_target_attributes(std::string_view ir_text, const TargetAttributes& attrs) {
  std::string out;
  out.reserve(ir_text.size());
  size_t pos = 0;
  while (pos < ir_text.size()) {
    size_t nl = ir_text.find('\n', pos);
    const size_t end = nl == std::string_view::npos ? ir_text.size() : nl;
    std::string line(ir_text.substr(pos, end - pos));
    pos = end + 1;
    if (is_attribute_group(line) && line.find("\"target-cpu\"") != std::string::npos) {
      line = std::regex_replace(line, attr_regex(), "");
      const size_t close = line.rfind('}');
      std::string added;
      for (const char* name : kTargetAttrs)
        if (auto it = attrs.find(name); it != attrs.end())
          added += " \"" + it->first + "\"=\"" + it->second + "\"";
      if (close != std::string::npos) {
        // Keep the single space before the closing brace.
        size_t insert_at = close;
        while (insert_at > 0 && line[insert_at - 1] == ' ')
          --insert_at;
        line = line.substr(0, insert_at) + added + " }" + line.substr(close + 1);
      }
    }
    out += line;
    if (end < ir_text.size())
      out.push_back('\n');
  }
  return out;
}

void lower_ir(const ToolchainDriver& driver, const fs::path& ir,
              const std::vector<std::string>& flags, Language language, const fs::path& object,
              const fs::path& cwd, const std::string& unit) {
  TempDir tmp("irforge-lower");
  const fs::path bc = tmp.path() / "unit.bc";
  fs::copy_file(ir, bc);
  const fs::path ll = tmp.path() / "unit.ll";
  driver.run(Capability::EmitIrText, {}, bc.string(), ll.string(), tmp.path(), unit);
  const TargetAttributes attrs = probe_target_attributes(driver, flags, language);
  const fs::path retargeted = tmp.path() / "unit.retargeted.ll";
  write_file_atomic(retargeted, rewrite_target_attributes(read_file(ll), attrs));
  if (object.has_parent_path())
    fs::create_directories(object.parent_path());
  // A language override would make the driver parse the IR as source.
  std::vector<std::string> lowering;
  for (size_t i = 0; i < flags.size(); ++i) {
    if (flags[i] == "-x") {
      ++i;
      continue;
    }
    if (flags[i].starts_with("-x") && flags[i].size() > 2)
      continue;
    lowering.push_back(flags[i]);
  }
  driver.run(Capability::Lower, lowering, retargeted.string(), object.string(), cwd, unit);
}

} // namespace irforge
