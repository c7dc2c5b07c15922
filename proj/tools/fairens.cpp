#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairens/commands.hpp"

using namespace fairens::cli;

int main(int argc, char** argv) {
  CLI::App app{"fairens: composing bias mitigators with ensemble learners"};
  app.require_subcommand(1);

  ValidateArgs vargs;
  CLI::App* validate =
      app.add_subcommand("validate", "Check a run configuration and print the plan grid");
  validate->add_option("config", vargs.config, "run configuration JSON file")->required();

  RunArgs rargs;
  std::string run_out;
  int run_jobs = 0, run_trials = 0;
  std::uint64_t run_seed = 0;
  CLI::App* run =
      app.add_subcommand("run", "Select mitigators, run the experiment grid, export records");
  run->add_option("config", rargs.config, "run configuration JSON file")->required();
  run->add_option("--output-dir", run_out, "override the configured output directory");
  run->add_option("--jobs", run_jobs, "override the worker thread count");
  run->add_option("--trials", run_trials, "override the trial count");
  run->add_option("--seed", run_seed, "override the base seed");

  SelectArgs sargs;
  std::string sel_out;
  int sel_trials = 0;
  std::uint64_t sel_seed = 0;
  CLI::App* select =
      app.add_subcommand("select", "Run only the mitigator grid search (step 1)");
  select->add_option("config", sargs.config, "run configuration JSON file")->required();
  select->add_option("--output-dir", sel_out, "override the configured output directory");
  select->add_option("--trials", sel_trials, "override the trial count");
  select->add_option("--seed", sel_seed, "override the base seed");

  AnalyzeArgs aargs;
  std::string analyze_out, analyze_meta;
  CLI::App* analyze =
      app.add_subcommand("analyze", "Aggregate a record file into tables, curves, or guidance");
  analyze->add_option("records", aargs.records, "records.jsonl produced by run")->required();
  analyze->add_option("--mode", aargs.mode, "standardize | tables | resources | guidance")
      ->check(CLI::IsMember({"standardize", "tables", "resources", "guidance"}));
  analyze->add_option("--out", analyze_out, "directory for CSV/text/DOT outputs");
  analyze->add_option("--meta", analyze_meta, "run_meta.json with dataset facts (guidance)");

  AnalyzeArgs gargs;
  std::string guidance_out, guidance_meta;
  CLI::App* guidance =
      app.add_subcommand("guidance", "Shortcut for analyze --mode guidance");
  guidance->add_option("records", gargs.records, "records.jsonl produced by run")->required();
  guidance->add_option("--out", guidance_out, "directory for DOT/JSON outputs");
  guidance->add_option("--meta", guidance_meta, "run_meta.json with dataset facts");

  DemoArgs dargs;
  CLI::App* demo =
      app.add_subcommand("demo", "End-to-end run on two synthetic planted-bias datasets");
  demo->add_option("--out", dargs.output_dir, "output directory (default demo-out)");
  demo->add_option("--seed", dargs.seed, "base seed (default 7)");
  demo->add_option("--jobs", dargs.jobs, "worker threads (default 1)");

  FetchArgs fargs;
  std::string fetch_cache;
  CLI::App* fetch =
      app.add_subcommand("fetch", "Download a dataset into the cache and report its shape");
  fetch->add_option("id", fargs.id, "catalog id or numeric OpenML dataset id")->required();
  fetch->add_option("--cache-dir", fetch_cache, "cache directory (default .fairens-cache)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << nlohmann::json{{"error", {{"type", "usage"}, {"message", e.what()}}}}.dump()
              << "\n";
    return exit_config;
  }

  if (app.got_subcommand(validate)) return cmd_validate(vargs, std::cout, std::cerr);
  if (app.got_subcommand(run)) {
    if (run->count("--output-dir")) rargs.output_dir = run_out;
    if (run->count("--jobs")) rargs.jobs = run_jobs;
    if (run->count("--trials")) rargs.trials = run_trials;
    if (run->count("--seed")) rargs.seed = run_seed;
    return cmd_run(rargs, std::cout, std::cerr);
  }
  if (app.got_subcommand(select)) {
    if (select->count("--output-dir")) sargs.output_dir = sel_out;
    if (select->count("--trials")) sargs.trials = sel_trials;
    if (select->count("--seed")) sargs.seed = sel_seed;
    return cmd_select(sargs, std::cout, std::cerr);
  }
  if (app.got_subcommand(analyze)) {
    if (analyze->count("--out")) aargs.out_dir = analyze_out;
    if (analyze->count("--meta")) aargs.meta = analyze_meta;
    return cmd_analyze(aargs, std::cout, std::cerr);
  }
  if (app.got_subcommand(guidance)) {
    if (guidance->count("--out")) gargs.out_dir = guidance_out;
    if (guidance->count("--meta")) gargs.meta = guidance_meta;
    return cmd_guidance(gargs, std::cout, std::cerr);
  }
  if (app.got_subcommand(demo)) return cmd_demo(dargs, std::cout, std::cerr);
  if (app.got_subcommand(fetch)) {
    if (fetch->count("--cache-dir")) fargs.cache_dir = fetch_cache;
    return cmd_fetch(fargs, std::cout, std::cerr);
  }
  return exit_config;
}
