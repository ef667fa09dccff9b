// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irforge/catalog.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace irforge {

struct BuildFile {
  std::string name;
  std::string content;
};

/// The shipped discovery prompt template with `{file_content}` and `{schema}`.
std::string_view prompt_template();

/// Renders the template: files (with per-file headers, in order) replace
/// `{file_content}`, the schema text replaces `{schema}`; substituted text is
/// never rescanned. In-context examples follow the rendered template.
/// Raises ErrorKind::EmptyInput without build files.
std::string build_prompt(const std::vector<BuildFile>& files, std::string_view schema,
                         const std::vector<std::string>& examples = {});

/// Strips a Markdown code fence if present, then validates the catalog.
/// Raises ErrorKind::Unparseable when no JSON document can be found.
SpecializationCatalog parse_response(std::string_view text, CatalogOptions options = {});

struct EvalMetrics {
  size_t tp = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, f1 = 0;
  bool operator==(const EvalMetrics&) const = default;
};

EvalMetrics metrics_from_counts(size_t tp, size_t fp, size_t fn);

/// (category, name, flag) comparison unit.
using Triple = std::tuple<std::string, std::string, std::string>;

struct EvalOptions {
  bool normalize = true; // fold names, canonical flags
  bool include_optimization_flags = false;
};

std::set<Triple> catalog_triples(const SpecializationCatalog& catalog, EvalOptions options = {});

EvalMetrics evaluate(const SpecializationCatalog& predicted, const SpecializationCatalog& truth,
                     EvalOptions options = {});
std::map<std::string, EvalMetrics> evaluate_per_category(const SpecializationCatalog& predicted,
                                                         const SpecializationCatalog& truth,
                                                         EvalOptions options = {});

} // namespace irforge
