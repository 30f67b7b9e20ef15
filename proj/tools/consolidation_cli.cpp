#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "consol/commands.hpp"

int main(int argc, char** argv) {
  using namespace consol;

  CLI::App app{"Pore-pressure dissipation solver with physics-informed networks"};
  app.require_subcommand(1);

  std::string config, out, method = "fd", model, oracle = "fd", report;
  std::optional<std::uint64_t> seed;

  auto* train = app.add_subcommand("train", "train a network on one problem");
  train->add_option("--config", config, "run configuration (JSON)")->required();
  train->add_option("--out", out, "output directory")->required();
  train->add_option("--seed", seed, "overrides training.seed");

  auto* oracle_cmd = app.add_subcommand("oracle", "write reference grids at the snapshot times");
  oracle_cmd->add_option("--config", config, "run configuration (JSON)")->required();
  oracle_cmd->add_option("--method", method, "fd or series")->check(CLI::IsMember({"fd", "series"}));
  oracle_cmd->add_option("--out", out, "output directory")->required();

  auto* compare = app.add_subcommand("compare", "score a trained model against an oracle");
  compare->add_option("--model", model, "model document")->required();
  compare->add_option("--config", config, "run configuration (JSON)")->required();
  compare->add_option("--oracle", oracle, "fd or series")->check(CLI::IsMember({"fd", "series"}));
  compare->add_option("--report", report, "report path (JSON)")->required();
  compare->add_option("--seed", seed, "seed for the random test points");

  auto* cases = app.add_subcommand("case-study", "train one model per soil layer");
  cases->add_option("--config", config, "case-study configuration (JSON)")->required();
  cases->add_option("--out", out, "output directory")->required();
  cases->add_option("--seed", seed, "overrides training.seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (*train) return cmd_train(config, out, seed, std::cerr);
  if (*oracle_cmd) return cmd_oracle(config, *parse_oracle_method(method), out, std::cerr);
  if (*compare) return cmd_compare(model, config, *parse_oracle_method(oracle), report, seed, std::cerr);
  return cmd_case_study(config, out, seed, std::cerr);
}
