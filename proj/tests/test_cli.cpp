#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "drsd/cli.hpp"
#include "drsd/errors.hpp"

using namespace drsd;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = DRSD_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("drsd_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& sub, const fs::path& config, const fs::path& out,
            std::size_t jobs = 1, std::string* log_text = nullptr) {
  RunManifest m;
  m.subcommand = sub;
  m.config = config;
  m.out = out;
  m.jobs = jobs;
  std::ostringstream log;
  const int rc = run(m, log);
  if (log_text) *log_text = log.str();
  return rc;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("drsd_test_cli_" + name + ".json");
  std::ofstream(p) << text;
  return p;
}

int shell(const std::string& args) {
  const std::string cmd = std::string("\"") + DRSD_CLI_BINARY + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("bundled configs run and write their outputs") {
  struct Case {
    std::string file, sub;
    std::vector<int> codes;
    std::vector<std::string> outputs;
  };
  const std::vector<Case> cases = {
      {"paper-example.simulate.json", "simulate", {kExitOk}, {"trace.csv", "trace.svg", "summary.json"}},
      {"paper-example.transients.json", "compare", {kExitOk}, {"comparison.csv", "compare.svg", "run1.csv"}},
      {"paper-example.certify.json", "certify", {kExitOk}, {"certificate.json", "certificate.txt"}},
      {"paper-example.certify-coarse.json", "certify", {kExitCheckFailed}, {"certificate.txt"}},
      // The slope verdict itself is reported by the acceptance run.
      {"paper-example.consistency.json", "consistency", {kExitOk, kExitCheckFailed}, {"consistency.csv"}},
      {"paper-example.rob-sweep.json", "rob", {kExitOk}, {"rob.csv", "rob_table.csv"}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.file);
    const auto out = scratch(c.sub + "_" + std::to_string(&c - cases.data()));
    const int rc = run_cli(c.sub, kConfigs / c.file, out);
    CHECK(std::find(c.codes.begin(), c.codes.end(), rc) != c.codes.end());
    for (const auto& f : c.outputs) {
      CAPTURE(f);
      REQUIRE(fs::exists(out / f));
      CHECK(fs::file_size(out / f) > 0);
    }
  }
}

TEST_CASE("unknown registry ids are usage errors that list the alternatives") {
  const auto cfg = write_config("unknown_plant", R"({"plant": {"id": "nope"},
    "rates": {"T": 0.05, "ell": 2, "h": 0.05, "horizon_s": 1, "x0": [1, 0]}})");
  std::string log;
  CHECK(run_cli("simulate", cfg, scratch("unknown"), 1, &log) == kExitUsage);
  CHECK(log.find("nope") != std::string::npos);
  CHECK(log.find("paper-example") != std::string::npos);
  CHECK(log.find("custom") != std::string::npos);

  const auto law = write_config("unknown_law", R"({"plant": {"id": "paper-example"},
    "law": {"id": "pid"},
    "rates": {"T": 0.05, "ell": 2, "h": 0.05, "horizon_s": 1, "x0": [1, 0]}})");
  CHECK(run_cli("simulate", law, scratch("unknown_law"), 1, &log) == kExitUsage);
  CHECK(log.find("pid") != std::string::npos);
}

TEST_CASE("malformed configs are usage errors") {
  CHECK(run_cli("simulate", kConfigs / "missing.json", scratch("missing")) == kExitUsage);
  const auto bad = write_config("bad_json", "{ plant: ");
  CHECK(run_cli("simulate", bad, scratch("bad")) == kExitUsage);
  const auto extra = write_config("extra_section", R"({"plant": {"id": "paper-example"},
    "bogus": {}})");
  CHECK(run_cli("simulate", extra, scratch("extra")) == kExitUsage);
  CHECK(run_cli("frobnicate", kConfigs / "paper-example.simulate.json", scratch("sub")) ==
        kExitUsage);
}

TEST_CASE("diverging simulation exits with the divergence code") {
  const auto cfg = write_config("diverge", R"({"plant": {"id": "paper-example"},
    "law": {"id": "paper-example"}, "disturbance": {"id": "paper-example"},
    "rates": {"T": 0.38, "ell": 1, "h": 0.38, "horizon_s": 60, "x0": [1.2, -5.9]}})");
  const auto out = scratch("diverge");
  CHECK(run_cli("simulate", cfg, out) == kExitDivergence);
  CHECK(fs::exists(out / "trace.csv"));
}

TEST_CASE("custom plant, law and piecewise disturbance from expressions") {
  const auto cfg = write_config("custom", R"({
    // comments are allowed
    "plant": {"id": "custom", "f": ["x2", "-x1 - a*x2 + u1 + w1"], "input_dim": 1,
              "disturbance_dim": 1, "params": {"a": 0.5}, "lipschitz_hint": 2, "approx": "euler", "estimator": "euler"},
    "law": {"id": "custom", "u": ["-x1 - x2"]},
    "disturbance": {"id": "piecewise-constant", "pieces": [{"start": 0, "end": 1, "value": [0.2]}],
                    "tail": [0]},
    "rates": {"T": 0.05, "ell": 4, "h": 0.05, "horizon_s": 10, "x0": [1, 0]}})");
  const auto out = scratch("custom");
  CHECK(run_cli("simulate", cfg, out) == kExitOk);
  CHECK(slurp(out / "trace.csv").size() > 1000);
}

TEST_CASE("repeated runs are byte-identical") {
  const auto a = scratch("rep_a");
  const auto b = scratch("rep_b");
  REQUIRE(run_cli("simulate", kConfigs / "paper-example.simulate.json", a) == kExitOk);
  REQUIRE(run_cli("simulate", kConfigs / "paper-example.simulate.json", b, 3) == kExitOk);
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));

  REQUIRE(run_cli("certify", kConfigs / "paper-example.certify.json", a, 1) == kExitOk);
  REQUIRE(run_cli("certify", kConfigs / "paper-example.certify.json", b, 3) == kExitOk);
  CHECK(slurp(a / "certificate.json") == slurp(b / "certificate.json"));
}

TEST_CASE("command-line front end") {
  CHECK(shell("") == kExitUsage);
  CHECK(shell("simulate") == kExitUsage);
  CHECK(shell("simulate --config x.json --jobs 0") == kExitUsage);
  CHECK(shell("--help") == kExitOk);
  const auto out = scratch("front");
  CHECK(shell("simulate --config \"" + (kConfigs / "paper-example.simulate.json").string() +
              "\" --out \"" + out.string() + "\" --jobs 2 -v") == kExitOk);
  CHECK(fs::exists(out / "summary.json"));
  CHECK(shell("certify --config \"" + (kConfigs / "paper-example.certify-coarse.json").string() +
              "\" --out \"" + out.string() + "\"") == kExitCheckFailed);
}
