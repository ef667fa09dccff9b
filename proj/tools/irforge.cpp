// SPDX-License-Identifier: Apache-2.0
#include "irforge/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return irforge::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
