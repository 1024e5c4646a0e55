#include <iostream>

#include "dyner_cli/cli.hpp"

int main(int argc, char** argv) {
  return dyner::cli::run_cli({argv, argv + argc}, std::cout, std::cerr);
}
