#include <iostream>

#include <CLI11.hpp>

#include "hypermane/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fixed-energy geodesics and hyperbolic motions for generalized N-body potentials"};
  std::string spec_path;
  std::string mode;
  int workers = 0;
  long long seed = -1;
  std::string out;
  bool quiet = false;
  app.add_option("--spec", spec_path, "Problem spec JSON")->required();
  app.add_option("--mode", mode, "strict or exploratory")->check(CLI::IsMember({"strict", "exploratory"}));
  app.add_option("--workers", workers, "Concurrent solves")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for sampled checks")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out, "Output directory");
  app.add_flag("--quiet", quiet, "Suppress progress messages");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : hypermane::kExitBadSpec;
  }

  const hypermane::Diagnostics diag{&std::cerr, quiet};
  hypermane::ProblemSpec spec;
  try {
    spec = hypermane::load_problem_spec(spec_path);
    if (!mode.empty()) spec.mode = mode == "strict" ? hypermane::Mode::strict : hypermane::Mode::exploratory;
    if (workers > 0) spec.workers = workers;
    if (seed >= 0) spec.seed = static_cast<std::uint64_t>(seed);
    if (!out.empty()) spec.output_dir = out;
    spec.validate();
  } catch (const std::exception& e) {
    diag.error(e.what());
    return hypermane::kExitBadSpec;
  }
  return hypermane::run_command(spec, diag);
}
