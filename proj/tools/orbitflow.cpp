#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "orbitflow/commands.hpp"

namespace {

using orbitflow::cli::TrajectoryFormat;

TrajectoryFormat to_format(const std::string& s) {
  return s == "json" ? TrajectoryFormat::json : TrajectoryFormat::csv;
}

template <class T>
std::optional<T> given(const CLI::Option* opt, const T& value) {
  return opt->count() ? std::optional<T>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamiltonian flows on transadjoint orbits of Lie algebras"};
  app.require_subcommand(1);

  std::string config, out, summary, format = "csv", entry, system;
  double t = 0.0, dt = 0.0;
  std::uint64_t seed = 0;
  std::size_t n = 1;

  auto* validate = app.add_subcommand("validate", "Structural validation of a config");
  validate->add_option("config", config, "Config file")->required();
  auto* validate_out = validate->add_option("--out", out, "Report path");
  auto* validate_seed = validate->add_option("--seed", seed, "Sampling seed");

  auto* simulate = app.add_subcommand("simulate", "Integrate the configured Hamiltonian system");
  simulate->add_option("config", config, "Config file")->required();
  auto* sim_t = simulate->add_option("--t", t, "Duration (overrides config)");
  auto* sim_dt = simulate->add_option("--dt", dt, "Step (overrides config)");
  auto* sim_out = simulate->add_option("--out", out, "Trajectory path");
  auto* sim_summary = simulate->add_option("--summary", summary, "Summary JSON path");
  auto* sim_seed = simulate->add_option("--seed", seed, "Seed");
  simulate->add_option("--format", format, "Trajectory format")->check(CLI::IsMember({"csv", "json"}));

  auto* check = app.add_subcommand("check", "Invariance, involution, orbit and level-set checks");
  check->add_option("config", config, "Config file")->required();
  auto* check_out = check->add_option("--out", out, "Report path");
  auto* check_seed = check->add_option("--seed", seed, "Sampling seed");

  auto* catalog = app.add_subcommand("catalog", "Built-in examples");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "List entry ids");
  list->add_option("--format", format, "Listing format")->check(CLI::IsMember({"csv", "json"}));
  auto* export_cmd = catalog->add_subcommand("export", "Emit an entry as a config file");
  export_cmd->add_option("id", entry, "Entry id")->required();
  auto* export_system = export_cmd->add_option("--system", system, "System id");
  export_cmd->add_option("--n", n, "Oscillator family size");
  auto* export_dt = export_cmd->add_option("--dt", dt, "Step written into the config");
  auto* export_seed = export_cmd->add_option("--seed", seed, "Seed written into the config");
  auto* export_out = export_cmd->add_option("--out", out, "Config path");
  auto* run_all = catalog->add_subcommand("run-all", "Run every acceptance check");
  auto* run_all_out = run_all->add_option("--out", out, "Report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : orbitflow::cli::kParseError;
  }

  namespace c = orbitflow::cli;
  if (validate->parsed())
    return c::cmd_validate(config, given(validate_out, out), given(validate_seed, seed), std::cout);
  if (simulate->parsed())
    return c::cmd_simulate(config, given(sim_t, t), given(sim_dt, dt), given(sim_out, out), given(sim_summary, summary),
                           given(sim_seed, seed), to_format(format), std::cout);
  if (check->parsed()) return c::cmd_check(config, given(check_out, out), given(check_seed, seed), std::cout);
  if (list->parsed()) return c::cmd_catalog_list(to_format(format), std::cout);
  if (export_cmd->parsed())
    return c::cmd_catalog_export(entry, given(export_system, system), n, given(export_dt, dt), given(export_seed, seed),
                                 given(export_out, out), std::cout);
  if (run_all->parsed()) return c::cmd_catalog_run_all(given(run_all_out, out), std::cout);
  return c::kParseError;
}
