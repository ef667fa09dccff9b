// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irforge/error.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace irforge {

/// Validator for the draft-07 subset used by the catalog schema: type
/// (including unions), enum, const, properties, required,
/// additionalProperties (boolean or schema) and items. Unknown keywords are
/// ignored, as draft-07 requires.
class JsonSchema {
public:
  explicit JsonSchema(nlohmann::json schema);

  /// The catalog schema shipped in data/catalog.schema.json.
  static const JsonSchema& catalog();

  /// Every violation found, in document order; empty when `doc` conforms.
  std::vector<SchemaViolation> validate(const nlohmann::json& doc) const;

  const nlohmann::json& schema() const noexcept { return schema_; }

private:
  nlohmann::json schema_;
};

/// JSON-pointer escaping of one reference token.
std::string pointer_token(const std::string& key);

} // namespace irforge
