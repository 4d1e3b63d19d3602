#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ltn/cli/experiment.hpp"
#include "ltn/error.hpp"

namespace fs = std::filesystem;

namespace {

struct Command {
  CLI::App* app = nullptr;
  std::string experiment;  // empty for "run"
  std::string config_file;
  std::map<std::string, std::string> flags;
};

void add_config_flags(Command& cmd) {
  cmd.app->add_option("-c,--config", cmd.config_file, "key=value config file")->check(CLI::ExistingFile);
  for (const auto& key : ltn::config_keys()) {
    if (key == "experiment") continue;
    cmd.app->add_option("--" + key, cmd.flags[key], "overrides '" + key + "' from the config file");
  }
}

int run(const Command& cmd) {
  ltn::ExperimentConfig config;
  if (!cmd.experiment.empty()) config.experiment = ltn::experiment_from_string(cmd.experiment);
  if (!cmd.config_file.empty()) {
    ltn::load_config_file(config, cmd.config_file);
    if (!cmd.experiment.empty() && ltn::to_string(config.experiment) != cmd.experiment) {
      throw ltn::Error("config file is for experiment '" + ltn::to_string(config.experiment) + "', not '" +
                       cmd.experiment + "'");
    }
  } else if (cmd.experiment.empty()) {
    throw ltn::Error("run needs --config");
  }
  for (const auto& [key, value] : cmd.flags) {
    if (cmd.app->count("--" + key) > 0) config.set(key, value, fs::current_path());
  }
  const auto artifacts = ltn::run_experiment(config);
  for (const auto& f : artifacts.all_files()) std::cout << f.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logic tensor network experiments"};
  app.require_subcommand(1);

  std::map<std::string, Command> commands;
  auto& run_cmd = commands["run"];
  run_cmd.app = app.add_subcommand("run", "run the experiment named in a config file");
  add_config_flags(run_cmd);
  for (const auto& name : ltn::experiment_names()) {
    auto& cmd = commands[name];
    cmd.experiment = name;
    cmd.app = app.add_subcommand(name, "run the " + name + " experiment");
    add_config_flags(cmd);
  }

  std::string metrics;
  std::string plot_out = "plots";
  auto* plot = app.add_subcommand("plot", "write one (epoch, value) series per metrics CSV column");
  plot->add_option("metrics", metrics, "metrics CSV")->required();
  plot->add_option("-o,--out", plot_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (plot->parsed()) {
      for (const auto& f : ltn::emit_plot_data(metrics, plot_out)) std::cout << f.string() << "\n";
      return 0;
    }
    for (const auto& [name, cmd] : commands) {
      if (cmd.app->parsed()) return run(cmd);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
