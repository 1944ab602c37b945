#include <iostream>
#include <string>
#include <vector>

#include "hmrs/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return hmrs::run_cli(args, std::cout, std::cerr);
}
