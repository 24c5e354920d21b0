// Command-line front end: simulate, scenario, validate.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcsim/scenario.hpp"

namespace {

// Splits `key=value` pairs from --set.
bool parse_overrides(const std::vector<std::string>& raw, qcsim::RunOptions& opts)
{
  for (const std::string& s : raw) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "--set expects key=value, got '" << s << "'\n";
      return false;
    }
    opts.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return true;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Small-strain quasicrystal dynamics simulator"};
  app.require_subcommand(1);
  // Lets global options follow the subcommand; must precede add_subcommand.
  app.fallthrough();

  qcsim::RunOptions opts;
  std::vector<std::string> sets;
  std::string config_path, scenario, out_dir;

  app.add_flag("--override-gate", opts.override_gate, "Run even when the hypothesis gate fails");
  app.add_option("--set", sets, "Override a configuration key (key=value), repeatable");

  auto* sim = app.add_subcommand("simulate", "Run a configuration file");
  sim->add_option("config", config_path, "Configuration file")->required();
  sim->add_option("--out", out_dir, "Output directory (overrides output.directory)");

  auto* scen = app.add_subcommand("scenario", "Run a named preset");
  scen->add_option("name", scenario, "Scenario name")->required();
  scen->add_option("--out", out_dir, "Output directory");

  auto* val = app.add_subcommand("validate", "Parse a configuration and evaluate the gate only");
  val->add_option("config", config_path, "Configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qcsim::kExitConfig;
  }

  if (!parse_overrides(sets, opts)) return qcsim::kExitConfig;
  if (!out_dir.empty()) opts.out_dir = out_dir;

  if (*sim) return qcsim::simulate_file(config_path, opts, std::cout);
  if (*scen) return qcsim::run_scenario(scenario, opts, std::cout);
  return qcsim::validate_file(config_path, opts, std::cout);
}
