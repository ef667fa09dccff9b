// SPDX-License-Identifier: Apache-2.0
#include "irforge/catalog.hpp"
#include "irforge/flags.hpp"
#include "irforge/schema.hpp"
#include "irforge/version.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <random>

using namespace irforge;
using namespace irforge::testing;
using nlohmann::json;

namespace {

json gromacs_catalog() { return read_json_file(fixture("gromacs_catalog.json")); }

std::vector<SchemaViolation> violations_of(const json& doc) {
  try {
    validate_catalog(doc);
  } catch (const SchemaError& e) {
    return e.violations();
  }
  return {};
}

} // namespace

TEST_CASE("catalog: GROMACS-style catalog document") {
  const auto c = validate_catalog(gromacs_catalog());
  REQUIRE(c.gpu_backends.size() == 2);
  CHECK(c.gpu_backends.at("CUDA").minimum_version == "12.1");
  CHECK(c.gpu_backends.at("CUDA").build_flag == "-DGMX_GPU=CUDA");
  CHECK(c.gpu_backends.at("HIP").minimum_version == "5.4.3");
  CHECK(c.simd_vectorization.size() == 5);
  CHECK(c.gpu_build->value);
  CHECK(c.build_system.type == "cmake");
  CHECK(c.diagnostics.empty());
}

TEST_CASE("catalog: missing build_system") {
  json doc = gromacs_catalog();
  doc.erase("build_system");
  const auto v = violations_of(doc);
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "/build_system");
  CHECK(v[0].reason == "required key absent");
  CHECK(error_kind_of([&] { validate_catalog(doc); }) == ErrorKind::SchemaViolation);
}

TEST_CASE("catalog: empty document reports every required key") {
  const auto v = violations_of(json::object());
  const auto& required = JsonSchema::catalog().schema().at("required");
  CHECK(v.size() == required.size());
  for (const auto& key : required) {
    const std::string path = "/" + key.get<std::string>();
    CHECK(std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.path == path; }));
  }
}

TEST_CASE("catalog: malformed text is a syntax error") {
  CHECK(error_kind_of([] { validate_catalog(std::string_view("{\"gpu_build\": ")); }) ==
        ErrorKind::SyntaxError);
}

TEST_CASE("catalog: additional top-level properties are rejected") {
  json doc = gromacs_catalog();
  doc["notes"] = "x";
  const auto v = violations_of(doc);
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "/notes");
}

TEST_CASE("catalog: schema oracle agreement on the mutation corpus") {
  const json corpus = read_json_file(fixture("schema_corpus.json"));
  REQUIRE(corpus.size() >= 50);
  for (const auto& item : corpus) {
    CAPTURE(item.at("name").get<std::string>());
    const bool expected = item.at("valid").get<bool>();
    const bool ours = JsonSchema::catalog().validate(item.at("document")).empty();
    CHECK(ours == expected);
    bool accepted = true;
    try {
      validate_catalog(item.at("document"));
    } catch (const Error&) {
      accepted = false;
    }
    CHECK(accepted == expected);
  }
}

TEST_CASE("catalog: round trip is a fixed point after one normalization") {
  const json corpus = read_json_file(fixture("schema_corpus.json"));
  for (const auto& item : corpus) {
    if (!item.at("valid").get<bool>())
      continue;
    CAPTURE(item.at("name").get<std::string>());
    const auto once = validate_catalog(item.at("document"));
    const json serialized = to_json(once);
    CHECK(JsonSchema::catalog().validate(serialized).empty());
    const auto twice = validate_catalog(serialized);
    CHECK(to_json(twice) == serialized);
  }
}

TEST_CASE("catalog: flags are normalized on ingest; values keep their case") {
  json doc = gromacs_catalog();
  doc["gpu_backends"]["HIP"]["build_flag"] = "GMX-GPU=HIP";
  doc["gpu_backends"]["CUDA"]["build_flag"] = "-DGMX_GPU=cuda";
  const auto c = validate_catalog(doc);
  CHECK(c.gpu_backends.at("HIP").build_flag == "-DGMX_GPU=HIP");
  CHECK(c.gpu_backends.at("CUDA").build_flag == "-DGMX_GPU=cuda");
  CatalogOptions raw;
  raw.normalize_flags = false;
  CHECK(validate_catalog(doc, raw).gpu_backends.at("HIP").build_flag == "GMX-GPU=HIP");
}

TEST_CASE("catalog: null and absent optional fields are equivalent") {
  json doc = gromacs_catalog();
  doc["FFT_libraries"] = {{"fftpack", {{"used_as_default", false},
                                       {"build_flag", nullptr},
                                       {"condition", nullptr},
                                       {"dependencies", nullptr}}}};
  const auto c = validate_catalog(doc);
  CHECK_FALSE(c.fft_libraries.at("fftpack").build_flag.has_value());
  CHECK_FALSE(c.fft_libraries.at("fftpack").dependencies.has_value());
}

TEST_CASE("catalog: duplicate defaults in an exclusive category are diagnosed") {
  json doc = gromacs_catalog();
  doc["gpu_backends"]["CUDA"]["used_as_default"] = true;
  doc["gpu_backends"]["HIP"]["used_as_default"] = true;
  const auto c = validate_catalog(doc);
  CHECK(c.diagnostics.size() == 1);
}

TEST_CASE("flags: normalize_flag examples") {
  auto a = normalize_flag("GMX_SIMD");
  CHECK(a.key == "GMX_SIMD");
  CHECK(a.raw == "-DGMX_SIMD");
  CHECK_FALSE(a.value.has_value());
  auto b = normalize_flag("-DGMX_GPU=CUDA");
  CHECK(b.raw == "-DGMX_GPU=CUDA");
  CHECK(b.key == "GMX_GPU");
  CHECK(b.value == "CUDA");
  auto c = normalize_flag("-DGGML-CUDA");
  CHECK(c.raw == "-DGGML_CUDA");
  CHECK(normalize_flag(c.raw) == c);
  CHECK(normalize_flag("-DX=a-b").value == "a-b");
  CHECK(error_kind_of([] { normalize_flag(""); }) == ErrorKind::InvalidLabel);
}

TEST_CASE("flags: normalization is idempotent over a generated corpus") {
  std::mt19937 rng(7);
  const std::string alphabet = "ABCxyz_-019=D";
  std::uniform_int_distribution<size_t> len(1, 12), pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> prefix(0, 2);
  size_t checked = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string s = prefix(rng) == 0 ? "-D" : "";
    for (size_t n = len(rng); n > 0; --n)
      s += alphabet[pick(rng)];
    const auto once = try_canonical_flag(s);
    if (!once)
      continue;
    CHECK(try_canonical_flag(*once) == once);
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("version: dotted numeric comparison") {
  CHECK(*Version::parse("12.1") == *Version::parse("12.1.0"));
  CHECK(*Version::parse("12.10") > *Version::parse("12.9"));
  CHECK(version_at_least("12.1", "12.1"));
  CHECK_FALSE(version_at_least("11.8", "12.1"));
  CHECK(version_at_least("5.4.3", std::nullopt));
  CHECK_FALSE(version_at_least(std::nullopt, "1.0"));
}
