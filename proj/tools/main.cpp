#include <iostream>

#include "recount/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return recount::cli::run(args, std::cout, std::cerr);
}
