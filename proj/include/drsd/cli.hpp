#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "drsd/certify.hpp"
#include "drsd/rob.hpp"
#include "drsd/simloop.hpp"

namespace drsd {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitCheckFailed = 2, kExitDivergence = 3 };

struct RunManifest {
  std::string subcommand;  // simulate | rob | consistency | certify | compare
  std::filesystem::path config;
  std::filesystem::path out = "out";
  std::size_t jobs = 1;
  int verbosity = 0;
};

/// Parsed configuration file. Sections: plant, law, disturbance, rates,
/// certificate, query; every section except plant is optional and only read
/// by the subcommands that need it.
struct Config {
  nlohmann::json doc;

  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text);

  const nlohmann::json& section(const std::string& name) const;
  bool has(const std::string& name) const { return doc.contains(name); }
};

std::vector<std::string> registered_plants();
std::vector<std::string> registered_laws();
std::vector<std::string> registered_disturbances();
std::vector<std::string> registered_approx_models();
std::vector<std::string> registered_certificates();

/// Builders; unknown ids raise ConfigError naming the registered ids.
PlantModel build_plant(const Config& cfg);
ControlLaw build_law(const Config& cfg, std::size_t n);
DisturbanceSignal build_disturbance(const Config& cfg, std::size_t p);
ApproxModelFamily build_approx(const Config& cfg, const PlantModel& plant, double h,
                               const std::string& key = "approx");
ClosedLoopSetup build_setup(const Config& cfg);
LyapunovCertificate build_certificate(const Config& cfg);
RobQuery build_rob_query(const Config& cfg, std::size_t jobs);
std::vector<RobCellSpec> build_rob_schedule(const Config& cfg);

/// Dispatches a subcommand and writes its result files under manifest.out.
/// Returns an ExitCode; never throws.
int run(const RunManifest& manifest, std::ostream& log);

}  // namespace drsd
