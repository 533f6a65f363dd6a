#include <iostream>
#include <string>
#include <vector>

#include "trackadapt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return trackadapt::run_cli(args, std::cout);
}
