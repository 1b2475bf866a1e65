#include <CLI11.hpp>

#include "elasteig/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive mixed finite element eigenvalue solver for variable-E elasticity"};
  app.require_subcommand(1);

  elasteig::CommandOptions opts;
  std::string out;
  std::uint64_t seed = 0;
  std::string config;
  std::string fault;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "Output directory (overrides output.directory)");
    sub->add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Krylov start vector seed (overrides eigen.seed)");
  };

  auto* solve = app.add_subcommand("solve", "Solve one discrete eigenproblem");
  solve->add_option("config", config, "Experiment JSON")->required();
  add_common(solve);

  auto* study = app.add_subcommand("study", "Run a uniform or adaptive convergence study");
  study->add_option("config", config, "Experiment JSON")->required();
  add_common(study);

  auto* verify = app.add_subcommand("verify", "Check solver invariants");
  add_common(verify);
  verify->add_option("--inject-fault", fault, "Corrupt the input of the named check")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : elasteig::kExitConfig;
  }

  for (auto* sub : {solve, study, verify}) {
    if (!sub->parsed()) continue;
    if (sub->count("--out") > 0) opts.out = out;
    if (sub->count("--seed") > 0) opts.seed = seed;
  }

  if (solve->parsed()) return elasteig::cmd_solve(config, opts);
  if (study->parsed()) return elasteig::cmd_study(config, opts);
  return elasteig::cmd_verify(opts, fault);
}
