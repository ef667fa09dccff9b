// SPDX-License-Identifier: Apache-2.0
#include "irforge/discover.hpp"

#include "irforge/assets.hpp"
#include "irforge/error.hpp"
#include "irforge/flags.hpp"
#include "irforge/vector_levels.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace irforge {

namespace {

constexpr std::string_view kFileSlot = "{file_content}";
constexpr std::string_view kSchemaSlot = "{schema}";

std::string flag_text(const std::optional<std::string>& flag, bool normalize) {
  if (!flag)
    return {};
  if (!normalize)
    return *flag;
  return try_canonical_flag(*flag).value_or(*flag);
}

std::string name_text(const std::string& name, bool normalize) {
  return normalize ? fold_name(name) : name;
}

} // namespace

std::string_view prompt_template() { return *assets::find("prompt_template.txt"); }

std::string build_prompt(const std::vector<BuildFile>& files, std::string_view schema,
                         const std::vector<std::string>& examples) {
  if (files.empty())
    throw Error(ErrorKind::EmptyInput, "build_prompt needs at least one build file");
  std::string content;
  for (size_t i = 0; i < files.size(); ++i) {
    if (i)
      content += "\n";
    content += "### File: " + files[i].name + "\n" + files[i].content;
    if (!files[i].content.empty() && files[i].content.back() != '\n')
      content += "\n";
  }
  const std::string_view tmpl = prompt_template();
  std::string out;
  size_t pos = 0;
  while (pos < tmpl.size()) {
    const size_t f = tmpl.find(kFileSlot, pos);
    const size_t s = tmpl.find(kSchemaSlot, pos);
    const size_t next = std::min(f, s);
    if (next == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, next - pos));
    if (next == f) {
      out += content;
      pos = f + kFileSlot.size();
    } else {
      out.append(schema);
      pos = s + kSchemaSlot.size();
    }
  }
  for (size_t i = 0; i < examples.size(); ++i)
    out += "\nExample " + std::to_string(i + 1) + ":\n" + examples[i] + "\n";
  return out;
}

SpecializationCatalog parse_response(std::string_view text, CatalogOptions options) {
  std::string_view body = text;
  if (const size_t fence = body.find("```"); fence != std::string_view::npos) {
    size_t start = body.find('\n', fence);
    const size_t close = start == std::string_view::npos ? std::string_view::npos
                                                         : body.find("```", start + 1);
    if (start != std::string_view::npos && close != std::string_view::npos)
      body = body.substr(start + 1, close - start - 1);
  }
  const size_t open = body.find('{');
  const size_t last = body.rfind('}');
  if (open == std::string_view::npos || last == std::string_view::npos || last < open)
    throw Error(ErrorKind::Unparseable, "model response contains no JSON object");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body.substr(open, last - open + 1));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Unparseable, std::string("model response is not JSON: ") + e.what());
  }
  return validate_catalog(doc, options);
}

EvalMetrics metrics_from_counts(size_t tp, size_t fp, size_t fn) {
  EvalMetrics m{tp, fp, fn, 0, 0, 0};
  if (tp + fp > 0)
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0)
    m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0)
    m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

std::set<Triple> catalog_triples(const SpecializationCatalog& c, EvalOptions o) {
  std::set<Triple> out;
  auto add = [&](const char* cat, const std::string& name, const std::optional<std::string>& flag) {
    out.emplace(cat, name_text(name, o.normalize), flag_text(flag, o.normalize));
  };
  if (c.gpu_build && c.gpu_build->build_flag)
    add("gpu_build", "gpu_build", c.gpu_build->build_flag);
  for (const auto& [n, e] : c.gpu_backends)
    add("gpu_backends", n, e.build_flag);
  for (const auto& [n, e] : c.parallel_programming_libraries)
    add("parallel_programming_libraries", n, e.build_flag);
  for (const auto& [n, e] : c.linear_algebra_libraries)
    add("linear_algebra_libraries", n, e.build_flag);
  for (const auto& [n, e] : c.fft_libraries)
    add("FFT_libraries", n, e.build_flag);
  for (const auto& [n, e] : c.other_external_libraries)
    add("other_external_libraries", n, e.build_flag);
  for (const auto& [n, e] : c.simd_vectorization)
    out.emplace("simd_vectorization", o.normalize ? fold_level(n) : n,
                flag_text(e.build_flag, o.normalize));
  out.emplace("build_system", o.normalize ? fold_name(c.build_system.type) : c.build_system.type,
              "");
  if (o.include_optimization_flags)
    for (const auto& f : c.optimization_build_flags)
      out.emplace("optimization_build_flags", "", flag_text(f, o.normalize));
  return out;
}

namespace {

EvalMetrics compare(const std::set<Triple>& pred, const std::set<Triple>& truth) {
  size_t tp = 0;
  for (const auto& t : pred)
    tp += truth.contains(t);
  return metrics_from_counts(tp, pred.size() - tp, truth.size() - tp);
}

} // namespace

EvalMetrics evaluate(const SpecializationCatalog& predicted, const SpecializationCatalog& truth,
                     EvalOptions options) {
  return compare(catalog_triples(predicted, options), catalog_triples(truth, options));
}

std::map<std::string, EvalMetrics> evaluate_per_category(const SpecializationCatalog& predicted,
                                                         const SpecializationCatalog& truth,
                                                         EvalOptions options) {
  std::map<std::string, std::set<Triple>> p, t;
  for (const auto& x : catalog_triples(predicted, options))
    p[std::get<0>(x)].insert(x);
  for (const auto& x : catalog_triples(truth, options))
    t[std::get<0>(x)].insert(x);
  std::map<std::string, EvalMetrics> out;
  for (const auto& [cat, _] : p)
    out[cat] = compare(p[cat], t[cat]);
  for (const auto& [cat, _] : t)
    out[cat] = compare(p[cat], t[cat]);
  return out;
}

} // namespace irforge
