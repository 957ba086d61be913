// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "dmdn_cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dmdn::cli::run_cli(args, std::cout, std::cerr);
}
