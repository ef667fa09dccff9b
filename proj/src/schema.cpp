// SPDX-License-Identifier: Apache-2.0
#include "irforge/schema.hpp"

#include "irforge/assets.hpp"
#include "irforge/io.hpp"

namespace irforge {

using nlohmann::json;

namespace {

bool matches_type(const json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  if (type == "number") return value.is_number();
  if (type == "integer") {
    if (value.is_number_integer())
      return true;
    if (value.is_number_float()) {
      const double d = value.get<double>();
      return d == static_cast<double>(static_cast<long long>(d));
    }
    return false;
  }
  return false;
}

std::string type_list(const json& type) {
  if (type.is_string())
    return type.get<std::string>();
  std::string out;
  for (const auto& t : type) {
    if (!out.empty())
      out += " or ";
    out += t.get<std::string>();
  }
  return out;
}

void check(const json& schema, const json& value, const std::string& path,
           std::vector<SchemaViolation>& out) {
  if (schema.is_boolean()) {
    if (!schema.get<bool>())
      out.push_back({path.empty() ? "/" : path, "value not allowed"});
    return;
  }
  if (!schema.is_object())
    return;

  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) {
      ok = matches_type(value, it->get<std::string>());
    } else if (it->is_array()) {
      for (const auto& t : *it)
        ok = ok || (t.is_string() && matches_type(value, t.get<std::string>()));
    }
    if (!ok) {
      out.push_back({path.empty() ? "/" : path, "expected type " + type_list(*it)});
      return; // further keywords would only repeat the mismatch
    }
  }

  if (auto it = schema.find("enum"); it != schema.end() && it->is_array()) {
    bool found = false;
    for (const auto& candidate : *it)
      found = found || candidate == value;
    if (!found)
      out.push_back({path.empty() ? "/" : path, "value not in enum " + it->dump()});
  }

  if (auto it = schema.find("const"); it != schema.end() && *it != value)
    out.push_back({path.empty() ? "/" : path, "value differs from const " + it->dump()});

  if (value.is_object()) {
    const json* properties = nullptr;
    if (auto it = schema.find("properties"); it != schema.end() && it->is_object())
      properties = &*it;

    if (auto it = schema.find("required"); it != schema.end() && it->is_array()) {
      for (const auto& key : *it) {
        if (key.is_string() && !value.contains(key.get<std::string>()))
          out.push_back({path + "/" + pointer_token(key.get<std::string>()),
                         "required key absent"});
      }
    }

    const auto additional = schema.find("additionalProperties");
    for (const auto& [key, member] : value.items()) {
      const std::string child = path + "/" + pointer_token(key);
      if (properties && properties->contains(key)) {
        check((*properties)[key], member, child, out);
      } else if (additional != schema.end()) {
        if (additional->is_boolean() && !additional->get<bool>())
          out.push_back({child, "additional property not allowed"});
        else
          check(*additional, member, child, out);
      }
    }
  }

  if (value.is_array()) {
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string child = path + "/" + std::to_string(i);
        if (it->is_array()) {
          if (i < it->size())
            check((*it)[i], value[i], child, out);
        } else {
          check(*it, value[i], child, out);
        }
      }
    }
  }
}

} // namespace

std::string pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

JsonSchema::JsonSchema(json schema) : schema_(std::move(schema)) {}

const JsonSchema& JsonSchema::catalog() {
  static const JsonSchema instance(
      parse_json(*assets::find("catalog.schema.json"), "catalog.schema.json"));
  return instance;
}

std::vector<SchemaViolation> JsonSchema::validate(const json& doc) const {
  std::vector<SchemaViolation> out;
  check(schema_, doc, "", out);
  return out;
}

} // namespace irforge
