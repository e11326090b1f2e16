#include "debias/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return debias::run_cli(argc, argv, std::cout, std::cerr);
}
