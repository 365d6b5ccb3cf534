#include <iostream>
#include <string>
#include <vector>

#include "sgwp/app/commands.hpp"
#include "sgwp/app/config.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  sgwp::app::RunConfig cfg;
  try {
    std::string help;
    cfg = sgwp::app::parse_command_line(args, &help);
    if (cfg.command.empty()) {
      std::cout << help;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 64;
  }
  return sgwp::app::run_command(cfg, std::cout, std::cerr);
}
