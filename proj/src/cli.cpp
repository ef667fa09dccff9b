// SPDX-License-Identifier: Apache-2.0
#include "irforge/cli.hpp"

#include "irforge/assets.hpp"
#include "irforge/catalog.hpp"
#include "irforge/dedup.hpp"
#include "irforge/deploy.hpp"
#include "irforge/discover.hpp"
#include "irforge/error.hpp"
#include "irforge/forge.hpp"
#include "irforge/image_tag.hpp"
#include "irforge/io.hpp"
#include "irforge/matcher.hpp"
#include "irforge/provider.hpp"
#include "irforge/sysprobe.hpp"
#include "irforge/workspace.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace irforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::pair<std::string, std::string> split_pair(const std::string& text, char sep,
                                               const std::string& what) {
  const auto pos = text.find(sep);
  if (pos == std::string::npos || pos == 0)
    throw UsageError(what + " expects " + (sep == '=' ? "KEY=VALUE" : "NAME:KEY=VALUE") +
                     ", got '" + text + "'");
  return {text.substr(0, pos), text.substr(pos + 1)};
}

void emit(const json& doc, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-")
    out << dump_json(doc);
  else
    write_file_atomic(path, dump_json(doc));
}

fs::path default_store(const std::string& given) {
  if (!given.empty())
    return given;
  if (const char* env = std::getenv("IRFORGE_STORE"); env && *env)
    return env;
  throw UsageError("--store is required (or set IRFORGE_STORE)");
}

std::string error_record(std::string_view kind, std::string_view message) {
  return json{{"error", kind}, {"message", message}}.dump();
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"irforge: IR-container build and deployment toolchain", "irforge"};
  app.require_subcommand(1);
  bool json_mode = false;
  app.add_flag("--json", json_mode, "Machine-readable output and error records");

  // probe
  auto* probe = app.add_subcommand("probe", "Report target-system features");
  std::string probe_bundle, probe_out, probe_root = "/";
  bool probe_live = false;
  probe->add_option("--bundle", probe_bundle, "Declared probe bundle (JSON)");
  probe->add_flag("--live", probe_live, "Probe the host (default without --bundle)");
  probe->add_option("--root", probe_root, "Filesystem root for live probes")->capture_default_str();
  probe->add_option("--out", probe_out, "Output file (default: stdout)");

  // match
  auto* match = app.add_subcommand("match", "Intersect a catalog with system features");
  std::string match_catalog, match_features, match_prefs, match_out, match_resolved;
  std::vector<std::string> match_select;
  match->add_option("--catalog", match_catalog)->required();
  match->add_option("--features", match_features)->required();
  match->add_option("--select", match_select, "point=value choices");
  match->add_option("--prefs", match_prefs, "Operator preferences (JSON object)");
  match->add_option("--out", match_out, "Intersection output (default: stdout)");
  match->add_option("--out-resolved", match_resolved, "Resolved configuration output");

  // scan
  auto* scan = app.add_subcommand("scan", "Extract targets from compile databases");
  std::string scan_workspace_file, scan_build_root, scan_out, scan_project = "project";
  std::vector<std::string> scan_configs, scan_roots, scan_assign;
  scan->add_option("--workspace", scan_workspace_file, "Workspace file with a config matrix");
  scan->add_option("--config", scan_configs, "NAME=DBFILE");
  scan->add_option("--build-root", scan_build_root, "Build root of every configuration");
  scan->add_option("--config-root", scan_roots, "NAME=PATH per-configuration build root");
  scan->add_option("--assign", scan_assign, "NAME:point=value");
  scan->add_option("--project", scan_project);
  scan->add_option("--out", scan_out, "Scan output (default: stdout)");

  // dedup
  auto* dd = app.add_subcommand("dedup", "Compute the shared IR core and deltas");
  std::string dd_scan, dd_driver = "clang", dd_sd, dd_plan, dd_report;
  unsigned dd_jobs = 1;
  dd->add_option("--scan", dd_scan)->required();
  dd->add_option("--driver", dd_driver)->capture_default_str();
  dd->add_option("--sd-list", dd_sd, "JSON list of system-dependent target ids");
  dd->add_option("--jobs", dd_jobs)->check(CLI::PositiveNumber);
  dd->add_option("--out-plan", dd_plan)->required();
  dd->add_option("--out-report", dd_report)->required();

  // build
  auto* build = app.add_subcommand("build", "Emit IR artifacts and render the container recipe");
  std::string b_plan, b_driver = "clang", b_store, b_bases, b_recipe, b_manifests, b_dockerfile;
  unsigned b_jobs = 1;
  build->add_option("--plan", b_plan)->required();
  build->add_option("--driver", b_driver)->capture_default_str();
  build->add_option("--store", b_store, "IR store (default: $IRFORGE_STORE)");
  build->add_option("--bases", b_bases)->required();
  build->add_option("--out-recipe", b_recipe)->required();
  build->add_option("--out-manifests", b_manifests)->required();
  build->add_option("--out-dockerfile", b_dockerfile, "Default: Dockerfile next to the recipe");
  build->add_option("--jobs", b_jobs)->check(CLI::PositiveNumber);

  // deploy
  auto* dep = app.add_subcommand("deploy", "Plan (and optionally run) deploy-time lowering");
  std::string d_recipe, d_features, d_out, d_driver = "clang", d_store, d_root, d_opt;
  std::vector<std::string> d_select;
  bool d_execute = false;
  unsigned d_jobs = 1;
  dep->add_option("--recipe", d_recipe)->required();
  dep->add_option("--select", d_select, "point=value choices");
  dep->add_option("--features", d_features)->required();
  dep->add_option("--opt-level", d_opt, "Override the recorded optimization level");
  dep->add_flag("--execute", d_execute, "Run the lowering steps");
  dep->add_option("--driver", d_driver)->capture_default_str();
  dep->add_option("--store", d_store, "IR store (default: $IRFORGE_STORE)");
  dep->add_option("--build-root", d_root, "Where the selected build directory lives");
  dep->add_option("--jobs", d_jobs)->check(CLI::PositiveNumber);
  dep->add_option("--out", d_out, "Deployment plan output (default: stdout)");

  // discover
  auto* disc = app.add_subcommand("discover", "Ask a model for the specialization catalog");
  std::vector<std::string> disc_files, disc_examples;
  std::string disc_provider, disc_out, disc_schema, disc_prompt_out;
  disc->add_option("--build-file", disc_files)->required();
  disc->add_option("--provider", disc_provider)->required();
  disc->add_option("--example", disc_examples, "In-context example files");
  disc->add_option("--schema", disc_schema, "Schema text (default: shipped schema)");
  disc->add_option("--prompt-out", disc_prompt_out, "Also write the rendered prompt");
  disc->add_option("--out", disc_out, "Catalog output (default: stdout)");

  // eval
  auto* ev = app.add_subcommand("eval", "Compare a predicted catalog with ground truth");
  std::string ev_pred, ev_truth;
  bool ev_per_cat = false, ev_raw = false, ev_opt = false;
  ev->add_option("--pred", ev_pred)->required();
  ev->add_option("--truth", ev_truth)->required();
  ev->add_flag("--per-category", ev_per_cat);
  ev->add_flag("--no-normalize", ev_raw, "Compare spellings verbatim");
  ev->add_flag("--include-optimization-flags", ev_opt);

  std::vector<std::string> argv_store{"irforge"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store)
    argv.push_back(a.data());

  const bool want_json =
      std::find(args.begin(), args.end(), std::string("--json")) != args.end();
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    const auto first = std::find_if(args.begin(), args.end(),
                                    [](const std::string& a) { return !a.starts_with("-"); });
    if (app.get_subcommands().empty() && first != args.end())
      message = "unknown subcommand '" + *first + "'";
    if (want_json) {
      err << error_record("UsageError", message) << "\n";
    } else {
      err << "irforge: " << message << "\n";
      const auto subs = app.get_subcommands();
      err << (subs.empty() ? app.help() : subs.front()->help());
    }
    return 2;
  }

  try {
    if (probe->parsed()) {
      std::optional<json> bundle;
      if (!probe_bundle.empty())
        bundle = read_json_file(probe_bundle);
      ProbeEnvironment env;
      env.root = probe_root;
      const auto report = discover_system(bundle, probe_live || !bundle, env);
      emit(to_json(report), probe_out, out);
      for (const auto& w : report.warnings)
        if (!json_mode)
          err << "warning: " << w << "\n";
    } else if (match->parsed()) {
      const auto catalog = validate_catalog(read_file(match_catalog));
      const auto features = parse_bundle(read_json_file(match_features));
      SystemFeatureReport report = features;
      apply_inference(report);
      const auto common = intersect(catalog, report);
      emit(to_json(common), match_out, out);
      for (const auto& w : common.warnings)
        if (!json_mode)
          err << "warning: " << w << "\n";
      if (!match_select.empty() || !match_prefs.empty() || !match_resolved.empty()) {
        Selection choices;
        for (const auto& s : match_select) {
          auto [p, v] = split_pair(s, '=', "--select");
          choices[p] = v;
        }
        std::optional<Selection> prefs;
        if (!match_prefs.empty())
          prefs = read_json_file(match_prefs).get<Selection>();
        const auto resolved = resolve(common, choices, prefs);
        json doc = to_json(resolved);
        doc["tag"] = image_tag(resolved);
        emit(doc, match_resolved, out);
      }
    } else if (scan->parsed()) {
      std::vector<BuildConfiguration> configs;
      std::string project = scan_project;
      if (!scan_workspace_file.empty()) {
        const auto ws = workspace_from_json(read_json_file(scan_workspace_file),
                                            fs::path(scan_workspace_file).parent_path());
        project = ws.project;
        configs = scan_workspace(ws);
      } else {
        if (scan_configs.empty())
          throw UsageError("scan needs --workspace or at least one --config NAME=DBFILE");
        std::map<std::string, std::string> roots;
        for (const auto& r : scan_roots) {
          auto [n, p] = split_pair(r, '=', "--config-root");
          roots[n] = p;
        }
        std::map<std::string, Assignments> assigns;
        for (const auto& a : scan_assign) {
          auto [n, rest] = split_pair(a, ':', "--assign");
          auto [p, v] = split_pair(rest, '=', "--assign");
          assigns[n][p] = v;
        }
        for (const auto& c : scan_configs) {
          auto [name, db] = split_pair(c, '=', "--config");
          std::string root = roots.contains(name) ? roots[name] : scan_build_root;
          if (root.empty())
            throw UsageError("configuration '" + name + "' needs --build-root or --config-root");
          configs.push_back(scan_configuration(name, assigns[name], db, root));
        }
      }
      emit(scan_to_json(project, configs), scan_out, out);
    } else if (dd->parsed()) {
      const auto configs = scan_from_json(read_json_file(dd_scan));
      DedupOptions opts;
      opts.jobs = dd_jobs;
      if (!dd_sd.empty())
        opts.sd_list = read_json_file(dd_sd).get<std::vector<std::string>>();
      const auto [plan, report] = dedup(configs, ToolchainDriver::from_spec(dd_driver), opts);
      write_file_atomic(dd_plan, dump_json(to_json(plan)));
      write_file_atomic(dd_report, dump_json(to_json(report)));
      if (json_mode) {
        out << to_json(report).dump() << "\n";
      } else {
        out << "configurations: " << report.N << "\nsum_T: " << report.sum_T
            << "\nT_prime: " << report.T_prime << "\nreduction: " << report.reduction << "\n";
      }
    } else if (build->parsed()) {
      const DedupPlan plan = plan_from_json(read_json_file(b_plan));
      const json bases = read_json_file(b_bases);
      EmitStats stats;
      const auto artifacts = emit_ir_set(plan, ToolchainDriver::from_spec(b_driver),
                                         default_store(b_store), b_jobs, &stats);
      std::vector<json> manifests;
      for (const auto& c : plan.configs) {
        manifests.push_back(render_install_manifest(c.name, plan, artifacts));
        write_file_atomic(fs::path(b_manifests) / (c.name + ".json"), dump_json(manifests.back()));
      }
      const auto recipe = render_container_recipe(plan, manifests, bases);
      write_file_atomic(b_recipe, dump_json(recipe.doc));
      const fs::path dockerfile = b_dockerfile.empty()
                                      ? fs::path(b_recipe).parent_path() / "Dockerfile"
                                      : fs::path(b_dockerfile);
      write_file_atomic(dockerfile, recipe.dockerfile);
      const json summary = {{"artifacts", artifacts.size()},
                            {"emitted", stats.emitted},
                            {"cache_hits", stats.cache_hits}};
      if (json_mode)
        out << summary.dump() << "\n";
      else
        out << "artifacts: " << artifacts.size() << " (emitted " << stats.emitted
            << ", cache hits " << stats.cache_hits << ")\n";
    } else if (dep->parsed()) {
      PointValues selection;
      for (const auto& s : d_select)
        selection.push_back(split_pair(s, '=', "--select"));
      DeployOptions opts;
      if (!d_opt.empty())
        opts.opt_level = d_opt;
      const json recipe = read_json_file(d_recipe);
      const auto features = discover_system(read_json_file(d_features), false);
      const auto plan = plan_deployment(recipe, selection, features, opts);
      if (d_execute) {
        if (d_root.empty())
          throw UsageError("--execute needs --build-root");
        execute_deployment(plan, ToolchainDriver::from_spec(d_driver), default_store(d_store),
                           d_root, d_jobs);
      }
      emit(to_json(plan), d_out, out);
    } else if (disc->parsed()) {
      std::vector<BuildFile> files;
      for (const auto& f : disc_files)
        files.push_back({fs::path(f).filename().string(), read_file(f)});
      std::vector<std::string> examples;
      for (const auto& e : disc_examples)
        examples.push_back(read_file(e));
      const std::string schema = disc_schema.empty()
                                     ? std::string(*assets::find("catalog.schema.json"))
                                     : read_file(disc_schema);
      const std::string prompt = build_prompt(files, schema, examples);
      if (!disc_prompt_out.empty())
        write_file_atomic(disc_prompt_out, prompt);
      const auto provider = provider_from_json(read_json_file(disc_provider),
                                               fs::path(disc_provider).parent_path());
      const auto reply = query_model(prompt, provider);
      const auto catalog = parse_response(reply.text);
      emit(to_json(catalog), disc_out, out);
      const json usage = {{"tokens_in", reply.tokens_in},
                          {"tokens_out", reply.tokens_out},
                          {"latency_seconds", reply.latency_seconds}};
      if (!disc_out.empty())
        out << (json_mode ? usage.dump() + "\n"
                          : "tokens in: " + std::to_string(reply.tokens_in) +
                                ", tokens out: " + std::to_string(reply.tokens_out) + "\n");
    } else if (ev->parsed()) {
      CatalogOptions copts;
      copts.normalize_flags = !ev_raw;
      const auto pred = validate_catalog(read_file(ev_pred), copts);
      const auto truth = validate_catalog(read_file(ev_truth), copts);
      EvalOptions eopts;
      eopts.normalize = !ev_raw;
      eopts.include_optimization_flags = ev_opt;
      auto metrics_json = [](const EvalMetrics& m) {
        return json{{"tp", m.tp},           {"fp", m.fp},         {"fn", m.fn},
                    {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
      };
      json doc = metrics_json(evaluate(pred, truth, eopts));
      doc["metadata"] = {{"unit", "(category, name, flag) triple"},
                         {"vectorization_levels", "one triple per level"},
                         {"normalized", !ev_raw}};
      if (ev_per_cat) {
        json per = json::object();
        for (const auto& [cat, m] : evaluate_per_category(pred, truth, eopts))
          per[cat] = metrics_json(m);
        doc["per_category"] = per;
      }
      out << dump_json(doc);
    }
    return 0;
  } catch (const UsageError& e) {
    if (json_mode)
      err << error_record("UsageError", e.what()) << "\n";
    else
      err << "irforge: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    if (json_mode)
      err << error_record(to_string(e.kind()), e.what()) << "\n";
    else
      err << "irforge: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    if (json_mode)
      err << error_record("Io", e.what()) << "\n";
    else
      err << "irforge: " << e.what() << "\n";
    return 1;
  }
}

} // namespace irforge
