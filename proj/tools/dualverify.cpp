// Command-line front end: verify, certify-dataset, switches.

#include "dualverify/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace dualverify;

namespace {

void add_common(CLI::App& cmd, cli::RunConfig& run, std::string& norm) {
  cmd.add_option("--net", run.net_path, "Network JSON file")->required();
  cmd.add_option("--iters", run.iterations, "Dual subgradient iterations per constraint");
  cmd.add_option("--tighten", run.tighten, "Per-neuron bound-tightening iterations (0 = off)");
  cmd.add_option("--seed", run.seed, "Attack seed");
  cmd.add_option("--out", run.out_path, "Write the JSON report here instead of stdout");
  cmd.add_option("--workers", run.workers, "Worker threads (0 = logical processors)");
  cmd.add_option("--epsilon", run.epsilon, "Perturbation radius");
  cmd.add_option("--norm", norm, "Perturbation norm: 1, 2 or inf");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified bounds for linear output specifications of feedforward networks"};
  app.require_subcommand(1);

  cli::RunConfig run;
  std::string method = "dual";
  std::string norm = "inf";

  auto* verify_cmd = app.add_subcommand("verify", "Verify the constraints of a spec file");
  add_common(*verify_cmd, run, norm);
  verify_cmd->add_option("--spec", run.spec_path, "Spec JSON file")->required();
  verify_cmd->add_option("--method", method,
                         "dual | interval | fixed-point | trust-region | attack | oracle");

  auto* dataset_cmd =
      app.add_subcommand("certify-dataset", "Certified and attack error rates over a dataset");
  add_common(*dataset_cmd, run, norm);
  dataset_cmd->add_option("--dataset", run.dataset_path, "Dataset JSON file")->required();

  auto* switches_cmd =
      app.add_subcommand("switches", "Bounds on adversarial prediction switches over time");
  add_common(*switches_cmd, run, norm);
  switches_cmd->add_option("--features", run.features_path, "Feature sequence JSON file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }

  try {
    run.norm = parse_norm(norm);
    run.method = cli::parse_method(method);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  }

  if (verify_cmd->parsed()) return cli::cmd_verify(run, std::cout, std::cerr);
  if (dataset_cmd->parsed()) return cli::cmd_certify_dataset(run, std::cout, std::cerr);
  return cli::cmd_switches(run, std::cout, std::cerr);
}
