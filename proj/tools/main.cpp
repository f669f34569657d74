#include <iostream>
#include <vector>

#include "maqa/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return maqa::run_cli(std::move(args), std::cin, std::cout, std::cerr);
}
