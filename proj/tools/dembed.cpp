#include <iostream>
#include <string>
#include <vector>

#include "dembed/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return dembed::cli::run(args, std::cout, std::cerr);
}
