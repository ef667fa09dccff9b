// SPDX-License-Identifier: Apache-2.0
#include "irforge/arch_flags.hpp"
#include "irforge/dedup.hpp"
#include "irforge/openmp.hpp"
#include "irforge/workspace.hpp"
#include "oracles.hpp"
#include "projects.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>

using namespace irforge;
using namespace irforge::testing;
namespace fs = std::filesystem;

namespace {

ToolchainDriver driver() { return ToolchainDriver::builtin_clang(clang_path()); }

/// Pipeline grouping expressed over (config, absolute output) pairs.
Grouping pipeline_grouping(const DedupPlan& plan) {
  std::map<std::string, std::set<Member>> groups;
  for (const auto& c : plan.configs)
    for (const auto& t : c.targets)
      if (t.key_id)
        groups[*t.key_id].insert({c.name, expand_root(t.id.output, c.build_root)});
  Grouping g;
  for (auto& [_, m] : groups)
    g.insert(m);
  return g;
}

} // namespace

TEST_CASE("dedup: LULESH-shaped fixture reduces 20 targets to 14 IR files") {
  if (!have_clang()) {
    MESSAGE("clang not available; skipped");
    return;
  }
  TempDir dir("irforge-test");
  const auto project = materialize(lulesh_project(), dir.path());
  const auto [plan, report] = dedup(project.scan(), driver());
  CHECK(report.N == 4);
  CHECK(report.sum_T == 20);
  CHECK(report.T_prime == 14);
  CHECK(report.reduction == doctest::Approx(0.3));
  CHECK(report.sd_count == 0);
  CHECK(report.si_count == 5);
  for (const auto& [name, t] : report.T)
    CHECK(t == 5);

  // Construct-free units merge across the OpenMP switch only.
  size_t merged = 0;
  for (const auto& [id, key] : plan.keys)
    if (key.openmp_merged) {
      ++merged;
      CHECK(key.members.size() == 2);
    }
  CHECK(merged == 3 * 2);
}

TEST_CASE("dedup: MPI-invariant construct-free units merge across all four configurations") {
  // With three units whose preprocessed text ignores the MPI switch, the
  // sound pipeline reaches 3 + 2 x 4 = 11 distinct IR files.
  if (!have_clang()) {
    MESSAGE("clang not available; skipped");
    return;
  }
  TempDir dir("irforge-test");
  const auto project = materialize(lulesh_mpi_invariant_project(), dir.path());
  const auto [plan, report] = dedup(project.scan(), driver());
  CHECK(report.sum_T == 20);
  CHECK(report.T_prime == 11);
  CHECK(plan.core.size() == 3);
}

TEST_CASE("dedup: single configuration keeps every target") {
  if (!have_clang()) {
    MESSAGE("clang not available; skipped");
    return;
  }
  TempDir dir("irforge-test");
  const auto project = materialize(single_config_project(), dir.path());
  DedupOptions opts;
  opts.sd_list = project.sd_list;
  const auto [plan, report] = dedup(project.scan(), driver(), opts);
  CHECK(report.T_prime == report.sum_T);
  CHECK(report.reduction == 0.0);
  CHECK(report.sd_count == 1);
}

TEST_CASE("dedup: identical databases in two configurations give T' = k") {
  if (!have_clang()) {
    MESSAGE("clang not available; skipped");
    return;
  }
  TempDir dir("irforge-test");
  ProjectSpec spec = single_config_project();
  spec.configs.push_back(spec.configs.front());
  spec.configs.back().assignments["copy"] = "2";
  spec.sd_sources.clear();
  const auto project = materialize(spec, dir.path());
  const auto [plan, report] = dedup(project.scan(), driver());
  const size_t k = report.T.begin()->second;
  CHECK(report.sum_T == 2 * k);
  CHECK(report.T_prime == k);
  CHECK(plan.core.size() == k);
  // Oracle: distinct IR bytes.
  CHECK(ir_byte_grouping(project, clang_path()).size() == k);
}

TEST_CASE("dedup: coverage, reconstruction and determinism on the synthetic projects") {
  if (!have_clang()) {
    MESSAGE("clang not available; skipped");
    return;
  }
  for (const auto& spec : synthetic_projects()) {
    CAPTURE(spec.name);
    TempDir dir("irforge-test");
    const auto project = materialize(spec, dir.path());
    const auto configs = project.scan();
    DedupOptions opts;
    opts.sd_list = project.sd_list;
    const auto [plan, report] = dedup(configs, driver(), opts);

    // Every (config, target) lands in exactly one of core, a delta, or SD.
    std::map<std::pair<std::string, TargetId>, int> seen;
    for (const auto& id : plan.core)
      for (const auto& m : plan.keys.at(id).members)
        ++seen[{m.config, m.target}];
    for (const auto& [config, ids] : plan.deltas)
      for (const auto& id : ids)
        for (const auto& m : plan.keys.at(id).members)
          if (m.config == config)
            ++seen[{m.config, m.target}];
    for (const auto& [config, targets] : plan.sd_targets)
      for (const auto& t : targets)
        ++seen[{config, t}];
    size_t total = 0;
    for (const auto& c : configs) {
      total += c.targets.size();
      for (const auto& t : c.targets)
        CHECK(seen[{c.name, t.id}] == 1);
    }
    CHECK(seen.size() == total);

    // Residual plus profile reproduces the original flags as a multiset.
    for (const auto& c : plan.configs)
      for (const auto& t : c.targets) {
        auto joined = t.residual;
        joined.insert(joined.end(), t.profile.tokens.begin(), t.profile.tokens.end());
        auto original = t.flags;
        std::sort(joined.begin(), joined.end());
        std::sort(original.begin(), original.end());
        CHECK(joined == original);
      }

    CHECK(report.T_prime < report.sum_T);
    CHECK(report.reduction >= 0.0);
    CHECK(report.reduction < 1.0);

    // Parallel execution yields the same plan.
    opts.jobs = 3;
    const auto [plan2, report2] = dedup(configs, driver(), opts);
    CHECK(to_json(plan2) == to_json(plan));
    CHECK(to_json(report2) == to_json(report));

    // Plan survives serialization.
    CHECK(to_json(plan_from_json(to_json(plan))) == to_json(plan));
  }
}

TEST_CASE("dedup: IR-byte grouping on the LULESH fixture splits only OpenMP-merged keys") {
  // The OpenMP flag varies on construct-free units here, and the compiler
  // records it as an IR module flag. The byte oracle therefore refines the
  // pipeline grouping: unmerged keys must match an oracle group exactly,
  // merged keys may split into exactly the with-flag and without-flag halves.
  if (!have_clang()) {
    MESSAGE("clang not available; skipped");
    return;
  }
  TempDir dir("irforge-test");
  const auto project = materialize(lulesh_project(), dir.path());
  const auto [plan, report] = dedup(project.scan(), driver());
  const auto oracle = ir_byte_grouping(project, clang_path());
  std::map<Member, const std::set<Member>*> oracle_of;
  for (const auto& g : oracle)
    for (const auto& m : g)
      oracle_of[m] = &g;

  std::map<std::string, std::set<Member>> groups;
  std::map<Member, bool> has_openmp_flag;
  for (const auto& c : plan.configs)
    for (const auto& t : c.targets) {
      const Member m{c.name, expand_root(t.id.output, c.build_root)};
      groups[*t.key_id].insert(m);
      has_openmp_flag[m] = std::find(t.flags.begin(), t.flags.end(), "-fopenmp") != t.flags.end();
    }
  size_t merged_keys = 0;
  for (const auto& [id, group] : groups) {
    const std::set<Member>& members = group;
    std::set<const std::set<Member>*> parts;
    for (const auto& m : members)
      parts.insert(oracle_of.at(m));
    if (!plan.keys.at(id).openmp_merged) {
      REQUIRE(parts.size() == 1);
      CHECK(**parts.begin() == members);
      continue;
    }
    ++merged_keys;
    CHECK(parts.size() == 2);
    for (const auto* part : parts) {
      CHECK(std::all_of(part->begin(), part->end(),
                        [&](const Member& m) { return members.contains(m); }));
      const bool flag = has_openmp_flag.at(*part->begin());
      CHECK(std::all_of(part->begin(), part->end(),
                        [&](const Member& m) { return has_openmp_flag.at(m) == flag; }));
    }
  }
  CHECK(merged_keys == 6);
  CHECK(oracle.size() == 20);
}

TEST_CASE("dedup: OpenMP flag on a construct-free unit changes IR module flags only") {
  // Diagnostic for the driver-specific deviation: the pipeline merges the
  // two targets (no OpenMP constructs), while the emitted IR differs by the
  // OpenMP module flag. The lowered objects are identical.
  if (!have_clang()) {
    MESSAGE("clang not available; skipped");
    return;
  }
  TempDir dir("irforge-test");
  const auto project = materialize(openmp_toggle_project(), dir.path());
  const auto [plan, report] = dedup(project.scan(), driver());
  CHECK(report.T_prime == 1);
  const auto oracle = ir_byte_grouping(project, clang_path());
  CHECK(oracle.size() == 2);

  const auto entries = read_entries(project);
  REQUIRE(entries.size() == 2);
  direct_compile(entries[0], clang_path(), dir.path() / "a.o");
  direct_compile(entries[1], clang_path(), dir.path() / "b.o");
  CHECK(compare_objects(dir.path() / "a.o", dir.path() / "b.o") != ObjectMatch::Different);
}

TEST_CASE("dedup: SD partition") {
  if (!have_clang()) {
    MESSAGE("clang not available; skipped");
    return;
  }
  TempDir dir("irforge-test");
  ProjectSpec spec = single_config_project();
  spec.sd_sources.clear();
  spec.files["src/start.s"] = ".text\n.globl start_hook\nstart_hook:\n  ret\n";
  spec.tus.push_back({"src/start.s", "", {}});
  const auto project = materialize(spec, dir.path());
  const auto configs = project.scan();

  SUBCASE("assembly is SD, C and C++ are SI") {
    const auto part = partition_targets(configs, {}, driver());
    REQUIRE(part.sd.size() == 1);
    CHECK(part.sd[0].second.source.ends_with("start.s"));
    CHECK(part.si.size() == configs[0].targets.size() - 1);
  }
  SUBCASE("user list by source path") {
    const auto part =
        partition_targets(configs, {(project.root / "src/device.cpp").string()}, driver());
    CHECK(part.sd.size() == 2);
  }
  SUBCASE("unknown id") {
    CHECK(error_kind_of([&] { partition_targets(configs, {"/nope.cpp"}, driver()); }) ==
          ErrorKind::UnknownTargetId);
  }
  SUBCASE("MPI-including unit stays SI") {
    TempDir d2("irforge-test");
    const auto lulesh = materialize(lulesh_project(), d2.path());
    const auto part = partition_targets(lulesh.scan(), {}, driver());
    CHECK(part.sd.empty());
    CHECK(part.si.size() == 20);
  }
}

TEST_CASE("dedup: errors") {
  CHECK(error_kind_of([] { dedup({}, ToolchainDriver::builtin_clang("clang")); }) ==
        ErrorKind::EmptyInput);
  if (!have_clang())
    return;
  TempDir dir("irforge-test");
  ProjectSpec spec = openmp_toggle_project();
  spec.files["src/plain.cpp"] = "int broken( { return 0; }\n#include \"missing.h\"\n";
  const auto project = materialize(spec, dir.path());
  try {
    dedup(project.scan(), driver());
    FAIL("expected a driver failure");
  } catch (const DriverError& e) {
    CHECK(e.kind() == ErrorKind::DriverFailure);
    CHECK(e.unit().find("plain.cpp") != std::string::npos);
    CHECK(e.stderr_text().find("missing.h") != std::string::npos);
  }
}

TEST_CASE("dedup: report arithmetic") {
  DedupPlan plan;
  PlanConfig a{"a", {}, "/b/a", {}}, b{"b", {}, "/b/b", {}};
  for (int i = 0; i < 3; ++i) {
    PlanTarget t;
    t.id = {"/s/" + std::to_string(i) + ".c", "«BUILD»/" + std::to_string(i) + ".o"};
    t.key_id = "k" + std::to_string(i);
    a.targets.push_back(t);
    if (i < 2) {
      t.key_id = i == 0 ? "k0" : "kb1";
      b.targets.push_back(t);
    }
  }
  plan.configs = {a, b};
  for (const char* k : {"k0", "k1", "k2", "kb1"})
    plan.keys[k] = PlanKey{};
  const auto r = make_report(plan);
  CHECK(r.N == 2);
  CHECK(r.sum_T == 5);
  CHECK(r.T_prime == 4);
  CHECK(r.reduction == doctest::Approx(0.2));
  CHECK(r.si_count == 3);
}

TEST_CASE("dedup: helpers") {
  SUBCASE("line markers are rewritten to the placeholder") {
    const std::string text = "# 1 \"/tmp/b1/gen/config.h\" 1\nint x;\n# 5 \"/tmp/b1\"\n"
                             "const char* s = \"/tmp/b1/x\";\n";
    const std::string norm = normalize_line_markers(text, "/tmp/b1");
    CHECK(norm.find("# 1 \"«BUILD»/gen/config.h\" 1") != std::string::npos);
    CHECK(norm.find("# 5 \"«BUILD»\"") != std::string::npos);
    // Only directives are rewritten; string literals keep their bytes.
    CHECK(norm.find("\"/tmp/b1/x\"") != std::string::npos);
    CHECK(normalize_line_markers(text, "/tmp/b10").find("/tmp/b1/gen") != std::string::npos);
  }
  SUBCASE("pseudo-file markers are dropped") {
    // Their line numbers only count predefined and command-line macros.
    const std::string a = "# 1 \"x.c\"\n# 1 \"<built-in>\" 1\n# 404 \"<built-in>\" 3\n"
                          "# 1 \"<command line>\" 1\n# 1 \"x.c\" 2\nint x;\n";
    const std::string b = "# 1 \"x.c\"\n# 1 \"<built-in>\" 1\n# 405 \"<built-in>\" 3\n"
                          "# 3 \"<command line>\" 1\n# 1 \"x.c\" 2\nint x;\n";
    CHECK(normalize_line_markers(a, "/r") == normalize_line_markers(b, "/r"));
    CHECK(normalize_line_markers(a, "/r") == "# 1 \"x.c\"\n# 1 \"x.c\" 2\nint x;\n");
  }
  SUBCASE("preprocessor-only flags") {
    CHECK(is_preprocessor_only_flag("-DX=1"));
    CHECK(is_preprocessor_only_flag("-I/x"));
    CHECK_FALSE(is_preprocessor_only_flag("-O2"));
    CHECK(codegen_flags({"-O2", "-DX", "-I/inc", "-fPIC", "-Wall", "-c"}) ==
          std::vector<std::string>{"-O2", "-fPIC"});
  }
  SUBCASE("recorded optimization level") {
    CHECK(recorded_opt_level({"-O3", "-c"}) == "-O3");
    CHECK(recorded_opt_level({"-O1", "-Os"}) == "-Os");
    CHECK(recorded_opt_level({"-c"}) == "-O0");
  }
}
