// Command-line front end for the hypercyclic-operator toolkit.
//
// Subcommands run the pipeline through the named stage (earlier stages are
// reused from cache when their configuration is unchanged):
//   belov-check, build-cantor, verify-identities, build-model, decompose,
//   orbit, run (everything), report (render summary from existing artifacts).
//
// Exit codes: 0 all checks pass, 1 execution error, 2 checks ran with
// failures, 3 all hard checks pass but a soft trend is flagged.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hcop/errors.hpp"
#include "hcop/pipeline.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Finite-precision construction and verification of a "
               "hypercyclic unitary-plus-rank-2 operator"};
  app.require_subcommand(0, 1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false, threads_set = false, print_cfg = false;
  app.add_option("--config", config_path, "Config file (key = value lines)");
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  app.add_option("--threads", threads, "Worker threads (overrides config)")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { threads_set = true; });
  app.add_option("--seed", seed, "Base RNG seed (overrides config)")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_flag("--print-config", print_cfg,
               "Print the effective configuration and exit");

  std::vector<CLI::App*> stage_cmds;
  for (const std::string& name : hcop::pipeline_stage_names()) {
    stage_cmds.push_back(
        app.add_subcommand(name, "Run the pipeline through this stage"));
  }
  CLI::App* cmd_run = app.add_subcommand("run", "Run the full pipeline");
  CLI::App* cmd_report =
      app.add_subcommand("report", "Render the summary from the last run");

  CLI11_PARSE(app, argc, argv);

  try {
    hcop::PipelineConfig cfg;
    if (!config_path.empty()) cfg = hcop::load_config_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads_set) cfg.threads = threads;
    if (seed_set) cfg.seed = seed;

    if (print_cfg) {
      std::cout << hcop::print_config(cfg);
      return 0;
    }

    if (cmd_report->parsed()) {
      const fs::path mp = fs::path(cfg.out_dir) / "manifest.json";
      hcop::RunManifest manifest;
      if (fs::exists(mp)) {
        std::ifstream in(mp);
        nlohmann::json j;
        in >> j;
        manifest = hcop::RunManifest::from_json(j);
      }
      std::cout << hcop::emit_report(cfg, manifest);
      return 0;
    }

    std::string through;
    for (CLI::App* c : stage_cmds) {
      if (c->parsed()) through = c->get_name();
    }
    if (through.empty() && !cmd_run->parsed()) {
      std::cout << app.help();
      return 0;
    }

    const hcop::PipelineResult result = hcop::run_pipeline(cfg, through);
    for (const hcop::StageRecord& s : result.manifest.stages) {
      std::printf("%-18s %-8s checks=%s  %8.2fs%s%s\n", s.name.c_str(),
                  s.status.c_str(),
                  s.status == "not run" ? "-" : (s.checks_pass ? "pass" : "FAIL"),
                  s.wall_time_s, s.error.empty() ? "" : "  error: ",
                  s.error.c_str());
    }
    hcop::emit_report(cfg, result.manifest);
    if (!result.trends_pass) {
      std::printf("soft trend flagged (see %s/trends.json)\n",
                  cfg.out_dir.c_str());
    }
    return result.exit_code();
  } catch (const hcop::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
