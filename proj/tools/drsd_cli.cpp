#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "drsd/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dual-rate sampled-data simulation and certificate checks"};
  app.require_subcommand(1);

  drsd::RunManifest m;
  m.jobs = std::max(1u, std::thread::hardware_concurrency());
  bool verbose = false;

  for (const char* name : {"simulate", "rob", "consistency", "certify", "compare"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", m.config, "JSON configuration file")->required();
    sub->add_option("--out", m.out, "output directory")->capture_default_str();
    sub->add_option("--jobs", m.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--verbose,-v", verbose, "progress on stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : drsd::kExitUsage;
  }
  m.subcommand = app.get_subcommands().front()->get_name();
  m.verbosity = verbose ? 1 : 0;
  return drsd::run(m, std::cerr);
}
