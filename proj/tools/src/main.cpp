#include <iostream>

#include "pddlwb/app/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pddlwb::app::run_cli(args, std::cout, std::cerr);
}
