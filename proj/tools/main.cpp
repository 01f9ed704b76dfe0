#include <iostream>
#include <string>
#include <vector>

#include "infodemic/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return infodemic::cli::run(args, std::cout, std::cerr);
}
