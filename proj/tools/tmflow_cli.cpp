#include <iostream>

#include "tmflow/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tmflow::cli::main(args, std::cout, std::cerr);
}
