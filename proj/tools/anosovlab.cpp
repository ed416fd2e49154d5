#include <CLI11.hpp>

#include <iostream>

#include "anosov/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for geodesic flows on surfaces"};
  app.set_version_flag("--version", std::string(anosov::kToolVersion));
  std::string command, config, out;
  long long seed = -1;
  int workers = -1;
  app.add_option("command", command, "pestov | terminator | anosov | xray | invariant | gulliver")
      ->required()
      ->check(CLI::IsMember({"pestov", "terminator", "anosov", "xray", "invariant", "gulliver"}));
  app.add_option("--config", config, "JSON configuration file")->required();
  app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--seed", seed, "random seed (overrides the config)")->check(CLI::NonNegativeNumber);
  app.add_option("--workers", workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    const auto cfg = anosov::load_config(config, seed, workers, out);
    const auto rep = anosov::run_command(command, cfg);
    std::cout << rep.dump(2) << "\n";
    return 0;
  } catch (const anosov::ToolError& e) {
    std::cerr << "anosovlab: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "anosovlab: solver failure: " << e.what() << "\n";
    return 4;
  }
}
