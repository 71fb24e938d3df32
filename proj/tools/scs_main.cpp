// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv + 1, argv + argc);
  return scs::cli::run(args, std::cout, std::cerr, std::cin);
}
