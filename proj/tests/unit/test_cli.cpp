// SPDX-License-Identifier: Apache-2.0
#include "irforge/cli.hpp"
#include "projects.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <sstream>

using namespace irforge;
using namespace irforge::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const fs::path& path) { return path.string(); }

} // namespace

TEST_CASE("cli: usage errors exit with 2") {
  const auto none = cli({});
  CHECK(none.code == 2);
  const auto bogus = cli({"bogus"});
  CHECK(bogus.code == 2);
  CHECK(bogus.err.find("unknown subcommand 'bogus'") != std::string::npos);

  const auto record = cli({"--json", "match", "--catalog", "x.json"});
  CHECK(record.code == 2);
  const auto doc = json::parse(record.err);
  CHECK(doc["error"] == "UsageError");
  CHECK(doc["message"].get<std::string>().find("--features") != std::string::npos);

  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli: match reproduces the worked example") {
  TempDir dir;
  const auto r = cli({"match", "--catalog", p(fixture("gromacs_catalog.json")), "--features",
                      p(fixture("gromacs_host_features.json")), "--out", p(dir.path() / "common.json"),
                      "--select", "vectorization=AVX_512", "--out-resolved",
                      p(dir.path() / "resolved.json")});
  CHECK(r.code == 0);
  CHECK(read_json_file(dir.path() / "common.json") == read_json_file(fixture("gromacs_common_expected.json")));
  CHECK(read_json_file(dir.path() / "resolved.json")["tag"] == "gpu-cuda_vectorization-avx-512");
}

TEST_CASE("cli: domain errors exit with 1 and name their kind") {
  TempDir dir;
  write_file_atomic(dir.path() / "bad.json", "{\"notes\": 1}");
  const auto r = cli({"--json", "match", "--catalog", p(dir.path() / "bad.json"), "--features",
                      p(fixture("gromacs_host_features.json"))});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"] == "SchemaViolation");

  const auto plain = cli({"match", "--catalog", p(dir.path() / "bad.json"), "--features",
                          p(fixture("gromacs_host_features.json"))});
  CHECK(plain.code == 1);
  CHECK(plain.err.find("SchemaViolation") != std::string::npos);

  const auto missing = cli({"--json", "eval", "--pred", p(dir.path() / "absent.json"), "--truth",
                            p(dir.path() / "absent.json")});
  CHECK(missing.code == 1);
}

TEST_CASE("cli: eval and discover") {
  TempDir dir;
  const auto d = cli({"discover", "--build-file", p(fixture("discover/CMakeLists.txt")),
                      "--provider", p(fixture("discover/provider_offline.json")), "--out",
                      p(dir.path() / "pred.json"), "--prompt-out", p(dir.path() / "prompt.txt")});
  REQUIRE(d.code == 0);
  CHECK(read_file(dir.path() / "prompt.txt").find("### File: CMakeLists.txt") != std::string::npos);
  const auto e = cli({"eval", "--pred", p(dir.path() / "pred.json"), "--truth",
                      p(fixture("discover/truth_catalog.json")), "--per-category"});
  REQUIRE(e.code == 0);
  const auto doc = json::parse(e.out);
  CHECK(doc["tp"] == 13);
  CHECK(doc["fp"] == 2);
  CHECK(doc["fn"] == 2);
  CHECK(doc.contains("per_category"));
  CHECK(doc.contains("metadata"));
}

TEST_CASE("cli: scan, dedup, build and deploy end to end") {
  if (!have_clang())
    return;
  TempDir dir;
  const auto project = materialize(gpu_project(false), dir.path() / "proj");
  const fs::path w = dir.path() / "work";
  fs::create_directories(w);
  write_file_atomic(w / "workspace.json",
                    json{{"project", "gpu"},
                         {"build_root", p(project.root)},
                         {"matrix", {{"gpu", {"CUDA", "None"}}}},
                         {"db_pattern", p(project.root / "build-{config}/compile_commands.json")},
                         {"root_pattern", p(project.root / "build-{config}")}}
                        .dump());
  const std::string drv = "clang:" + clang_path();
  REQUIRE(cli({"scan", "--workspace", p(w / "workspace.json"), "--out", p(w / "scan.json")}).code == 0);
  REQUIRE(cli({"dedup", "--scan", p(w / "scan.json"), "--driver", drv, "--out-plan",
               p(w / "plan.json"), "--out-report", p(w / "report.json")})
              .code == 0);
  const auto report = read_json_file(w / "report.json");
  CHECK(report.dump().find("\"sum_T\":4") != std::string::npos);

  write_file_atomic(w / "bases.json",
                    json{{"toolchain", "clang:14"},
                         {"deferred", {{"CUDA", "nvidia/cuda:{version}-runtime"}}},
                         {"gpu", {{"runtime_version", "12.1"}, {"cubin_capabilities", {"sm_80"}}}}}
                        .dump());
  REQUIRE(cli({"build", "--plan", p(w / "plan.json"), "--driver", drv, "--store", p(w / "store"),
               "--bases", p(w / "bases.json"), "--out-recipe", p(w / "recipe.json"),
               "--out-manifests", p(w / "manifests")})
              .code == 0);
  CHECK(fs::exists(w / "Dockerfile"));
  CHECK(fs::exists(w / "manifests" / "gpu-cuda.json"));

  write_file_atomic(w / "cpu_only.json",
                    json{{"CPU Info", {{"Architecture", "x86_64"}, {"Vectorization", {"avx2"}}}}}.dump());
  const auto bad = cli({"--json", "deploy", "--recipe", p(w / "recipe.json"), "--select", "gpu=CUDA",
                        "--features", p(w / "cpu_only.json")});
  CHECK(bad.code == 1);
  CHECK(json::parse(bad.err)["error"] == "IncompatibleGpu");

  const auto ok = cli({"deploy", "--recipe", p(w / "recipe.json"), "--select", "gpu=None",
                       "--features", p(w / "cpu_only.json"), "--execute", "--driver", drv,
                       "--store", p(w / "store"), "--build-root", p(w / "deployed")});
  CHECK(ok.code == 0);
  const auto plan = json::parse(ok.out);
  CHECK(plan["tag"] == "gpu-none");
  for (const auto& s : plan["steps"])
    CHECK(fs::exists(w / "deployed" /
                     fs::path(s["output"].get<std::string>().substr(std::string("«BUILD»/").size()))));
}
