// emitsim: spontaneous-emission experiments from JSON configs.

#include "emitsim/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Single-photon emission into discrete mode sets"};
  app.require_subcommand(1);

  emitsim::cli::CommandOptions opt;
  std::string cache;
  const char* experiments[][2] = {
      {"exact1d", "Atom coupled to equidistant oscillators, closed-form eigenpairs"},
      {"box3d", "Hydrogen 2p-1s in a rectangular box"},
      {"kicks", "Periodic phase kicks on the atom"},
      {"two-atom", "Two dipole-coupled atoms sharing one band"},
  };
  for (auto& [name, help] : experiments) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory")->required();
    sub->add_option("--threads", opt.threads, "worker threads, 0 for all cores")->default_val(1);
    sub->add_option("--cache", cache, "eigendecomposition cache directory (or EMITSIM_CACHE_DIR)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : emitsim::cli::exit_config;
  }
  if (!cache.empty()) opt.cache = cache;
  return emitsim::cli::run_command(app.get_subcommands().front()->get_name(), opt, std::clog,
                                   std::cerr);
}
