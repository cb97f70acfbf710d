// moyal: batch driver for the star-product experiments.
//
//   moyal run <config.json> [--grid-N N] [--grid-L L] [--theta0 t]
//   moyal describe <topic>
//
// Exit status: 0 when every check passes, 1 when some check fails,
// 2 on configuration or usage errors.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "moyal/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Moyal star product experiments"};
  app.require_subcommand(1);

  std::optional<int> grid_N;
  std::optional<double> grid_L, theta0;
  app.add_option("--grid-N", grid_N, "override grid points per axis");
  app.add_option("--grid-L", grid_L, "override grid half-extent");
  app.add_option("--theta0", theta0, "override theta with theta0 J");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--grid-N", grid_N, "override grid points per axis");
  run->add_option("--grid-L", grid_L, "override grid half-extent");
  run->add_option("--theta0", theta0, "override theta with theta0 J");

  std::string topic;
  auto* desc = app.add_subcommand("describe", "print the formula and conventions for a topic");
  desc->add_option("topic", topic, "topic name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*desc) {
      std::cout << moyal::describe(topic);
      return 0;
    }
    moyal::ExperimentConfig cfg = moyal::load_config(config_path);
    moyal::apply_overrides(cfg, {grid_N, grid_L, theta0});
    const moyal::Report report = moyal::run_experiment(cfg);
    moyal::write_report(report, cfg.output);
    for (auto& c : report.checks)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << c.value
                << (c.note.empty() ? "" : "  (" + c.note + ")") << "\n";
    std::cout << (report.passed() ? "all checks passed" : "some checks failed") << "; wrote " << cfg.output
              << ".report.json\n";
    return report.passed() ? 0 : 1;
  } catch (const moyal::ConfigError& e) {
    std::cerr << "ConfigError: " << e.what() << "\n";
  } catch (const moyal::UsageError& e) {
    std::cerr << "UsageError: " << e.what() << "\n";
  } catch (const moyal::MoyalError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
