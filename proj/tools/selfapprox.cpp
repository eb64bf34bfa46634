#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "selfapprox/cli.hpp"
#include "selfapprox/errors.hpp"

namespace cli = selfapprox::cli;

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments on shifted Dirichlet L-functions"};
  app.set_help_flag("-h,--help", "print this help");

  std::string command;
  std::string commands;
  for (const auto& name : cli::command_names()) commands += (commands.empty() ? "" : "|") + name;
  app.add_option("command", command, commands);

  std::string config_path;
  app.add_option("--config", config_path, "config file: key = value lines, JSON, or a manifest.json");

  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> options;
  for (const auto& key : cli::key_registry()) {
    std::string names = "--" + key.name;
    for (const auto& alias : key.aliases) names += ",--" + alias;
    options[key.name] = app.add_option(names, raw[key.name], key.help + " [" + key.default_value + "]")
                            ->allow_extra_args(false);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << cli::error_json(selfapprox::ConfigError(e.what())).dump() << "\n";
    return 2;
  }

  std::map<std::string, std::string> command_line;
  for (const auto& [key, option] : options)
    if (option->count() > 0) command_line[key] = raw[key];
  if (!config_path.empty()) command_line["config"] = config_path;

  std::optional<std::string> env_output_dir;
  if (const char* env = std::getenv("SELFAPPROX_OUTPUT_DIR")) env_output_dir = env;

  cli::RunConfig config;
  try {
    config = cli::resolve(command.empty() ? std::nullopt : std::optional<std::string>(command), command_line,
                          env_output_dir);
  } catch (const std::exception& e) {
    std::cerr << cli::error_json(e).dump() << "\n";
    return cli::exit_code(e);
  }
  return cli::run(config, std::cout, std::cerr);
}
