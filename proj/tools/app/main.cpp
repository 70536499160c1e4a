#include <iostream>
#include <string>
#include <vector>

#include "floquet_sep/cli/run.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return floquet_sep::cli::run(std::move(args), std::cout, std::cerr);
}
