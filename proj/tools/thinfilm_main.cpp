#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "thinfilm/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Thin-film equation experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool force = false;

  const char* names[] = {"simulate", "dispersion", "certify-blowup", "spreading", "regime"};
  const char* help[] = {
      "run the regularized problem and check the weighted bounds",
      "measure linear growth rates against the dispersion relation",
      "continue to blow-up and evaluate the second-moment certificate",
      "run a droplet and fit the support growth exponent",
      "tabulate regime and theorem flags over an (n, m) grid",
  };
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config, "key = value configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "seed for randomized placement (overrides run.seed)");
    sub->add_flag("--force", force, "certify-blowup outside the blow-up region");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : thinfilm::kExitConfig;
  }

  thinfilm::CommandOptions opt;
  if (!out.empty()) opt.out_dir = out;
  opt.seed = seed;
  opt.force = force;
  const auto* sub = app.get_subcommands().front();
  return thinfilm::run_command(sub->get_name(), config, opt, std::cerr);
}
