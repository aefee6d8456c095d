// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include "qcbind/cli.hpp"

int main(int argc, char** argv) {
  return qcbind::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
