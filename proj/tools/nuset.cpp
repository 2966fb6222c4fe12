#include <iostream>
#include <string>
#include <vector>

#include "nuset/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nuset::cli::run(args, std::cout, std::cerr);
}
