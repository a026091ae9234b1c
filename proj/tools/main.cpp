#include <iostream>
#include <string>
#include <vector>

#include "monoshrink/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return monoshrink::cli::dispatch(args, std::cout, std::cerr);
}
