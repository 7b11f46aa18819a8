// Batch front end: configure, run, diagnose, and emit plot-ready data.

#include <CLI11.hpp>

#include "hpc/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"1D hyperbolic-parabolic chemotaxis shock-formation runner"};

  hpc::pipeline::RunManifest manifest;
  app.add_option("--config", manifest.config_path, "flat key=value configuration file");
  app.add_option("--out", manifest.out_dir, "output directory (created if missing)");
  app.add_option("--mode", manifest.mode,
                 "simulate | diagnose | profile-check | initial-check | sweep")
      ->check(CLI::IsMember(
          {"simulate", "diagnose", "profile-check", "initial-check", "sweep"}));
  app.add_flag("--force", manifest.force, "run even if initial-data validation fails");
  app.add_option("--jobs", manifest.jobs, "worker pool size for sweeps")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  return hpc::pipeline::run(manifest);
}
