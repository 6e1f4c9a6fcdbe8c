#include <iostream>
#include <string>
#include <vector>

#include "wove/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  const std::vector<std::string> args(argv, argv + argc);
  return wove::run_cli(args, std::cout, std::cerr);
}
