#include <iostream>
#include <string>
#include <vector>

#include "nsfsa/io/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nsfsa::cli_main(args, std::cout, std::cerr);
}
