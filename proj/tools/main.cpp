#include <iostream>
#include <string>
#include <vector>

#include "eikonal/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return eikonal::cli::run(args, std::cout, std::cerr);
}
