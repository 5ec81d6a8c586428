#include <iostream>

#include <CLI11.hpp>

#include "hics/hicli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical compressed sensing toolkit"};
  app.require_subcommand(1);
  hics::CliOptions options;
  std::string config;
  std::string out = options.output_path.string();
  std::uint64_t seed = 0;

  for (const char* name : {"run", "sweep", "rip", "project"}) {
    const char* help = std::string(name) == "run"     ? "Run a single recovery trial"
                       : std::string(name) == "sweep" ? "Run a parameter sweep"
                       : std::string(name) == "rip"   ? "Compute restricted isometry constants"
                                                      : "Project a vector onto a sparsity model";
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config,-c", config, "JSON config file");
    sub->add_option("--out,-o", out, "Output directory");
    sub->add_option("--seed", seed, "Master seed override");
    sub->add_option("--set", options.overrides, "Override a config value: dotted.key=value")->take_all();
  }
  auto* verify = app.add_subcommand("verify", "Run the built-in property checks");
  verify->add_flag("--inject-adjoint-bug", options.inject_adjoint_bug)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hics::kExitConfigError;
  }

  const auto* chosen = app.get_subcommands().front();
  options.subcommand = chosen->get_name();
  if (!config.empty()) options.config_path = config;
  options.output_path = out;
  if (chosen->get_option_no_throw("--seed") && chosen->count("--seed") > 0) options.seed = seed;
  return hics::run_cli(options, std::cout, std::cerr);
}
