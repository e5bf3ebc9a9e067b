#include <iostream>

#include "crocopat/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return crocopat::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}
