#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cli.hpp"
#include "dwr/configuration.hpp"
#include "dwr/delaunay.hpp"
#include "dwr/kinks.hpp"

namespace dwr::cli {

int run_cli(int argc, char** argv) {
  CLI::App app{"Delaunay Potts toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);

  std::string config_path, out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  long instances = -1;

  using Command = int (*)(const ExperimentConfig&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"sample", "Run the birth-death Gibbs sampler and write JSON lines per sweep", cmd_sample},
      {"rc-sample", "Draw a configuration with its coupled random-cluster edges", cmd_rc_sample},
      {"ncc", "Expected boundary component count against alpha on fuzzed neighbourhoods", cmd_ncc},
      {"percolation", "Site and mixed site-bond percolation tables and comparisons", cmd_percolation},
      {"verify-geometry", "Fuzz the kink and arc checks", cmd_verify_geometry},
      {"constants", "Print the derived constants for the model parameters", cmd_constants},
  };
  std::map<CLI::App*, Command> dispatch;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Sectioned key=value config file");
    sub->add_option("--seed", seed, "Seed (overrides [run] seed)");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "Output path (default stdout)");
    if (name == "verify-geometry")
      sub->add_option("--instances", instances, "Instances per check (also sets the arc instances)")
          ->check(CLI::NonNegativeNumber);
    dispatch[sub] = fn;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    ConfigFile file = config_path.empty() ? ConfigFile{} : ConfigFile::load(config_path);
    if (instances >= 0) {
      file.set("verify-geometry", "instances", std::to_string(instances));
      file.set("verify-geometry", "arc_instances", std::to_string(instances));
    }
    ExperimentConfig config = make_config(sub->get_name(), file, seed, threads, out);
    return dispatch.at(sub)(config);
  } catch (const FalsificationError& e) {
    fmt::print(std::cerr, "falsified: {}\n", e.what());
    return kFalsified;
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const FormatError& e) {
    fmt::print(std::cerr, "input error: {}\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kConfigError;
  }
}

}  // namespace dwr::cli
