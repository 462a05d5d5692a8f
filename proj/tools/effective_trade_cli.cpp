#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "effective_trade/harness/commands.hpp"

int main(int argc, char** argv) {
  namespace h = effective_trade::harness;

  CLI::App app{"Bilateral exchange economies: enumeration, Nash checks, "
               "gradient dynamics and money audits"};
  app.set_version_flag("--version", std::string(h::kToolVersion));

  h::RunRequest request;
  std::string format = "table";
  std::uint64_t seed = 0;
  int flow_bound = 0;
  double tol = 0.0;

  app.add_option("command", request.command, "Command to run")
      ->required()
      ->check(CLI::IsMember(h::commands()));
  app.add_option("config", request.config_path,
                 "Scenario JSON (belief JSON for `mode`)")
      ->required();
  auto* out_opt = app.add_option("--out", request.out_dir,
                                 "Write artifacts into this directory");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized steps");
  auto* bound_opt = app.add_option("--flow-bound", flow_bound,
                                   "Upper bound on each integer flow");
  auto* tol_opt = app.add_option("--tol", tol, "Numerical tolerance");
  app.add_option("--format", format, "Console format")
      ->check(CLI::IsMember({"table", "csv"}));
  app.add_flag("--nash", request.nash,
               "nontatonnement: only accept Nash steps");
  (void)out_opt;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? h::kSuccess : h::kUsage;
  }

  if (*seed_opt) request.seed = seed;
  if (*bound_opt) request.flow_bound = flow_bound;
  if (*tol_opt) request.tolerance = tol;
  request.format = format == "csv" ? h::Format::csv : h::Format::table;

  return h::run(request, std::cout, std::cerr);
}
