#include "wlc/job.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>

int main(int argc, char** argv) {
  CLI::App app{"Worldline Monte Carlo Casimir energies for plate geometries"};
  app.require_subcommand(1);
  app.set_version_flag("--version", wlc::code_version());

  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file; flags override it")
      ->check(CLI::ExistingFile);
  std::map<std::string, std::string> flags;
  for (const auto& k : wlc::config_keys())
    if (k.key != "command") app.add_option("--" + k.key, flags[k.key], k.help);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen", "generate an ensemble file"},
      {"energy", "energy per area (parallel) or per length; edge term for semi-infinite plates"},
      {"coefficient", "universal force coefficient (comb: force per area)"},
      {"density", "energy density grid as CSV"},
      {"effective-area", "effective plate area including edge corrections"},
      {"validate", "self-test suite"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : wlc::kExitConfig;
  }

  wlc::JobConfig config;
  try {
    if (!config_path.empty()) config = wlc::load_config(config_path);
    config.command = app.get_subcommands().front()->get_name();
    for (const auto& k : wlc::config_keys())
      if (k.key != "command" && app.count("--" + k.key) > 0) config.set(k.key, flags[k.key]);
  } catch (const wlc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return wlc::kExitConfig;
  }

  const wlc::JobOutcome out = wlc::run_job(config, std::cerr);
  std::cout << out.record.dump(2) << '\n';
  if (out.record.contains("error")) std::cerr << "error: " << out.record["error"].get<std::string>() << '\n';
  return out.exit_code;
}
