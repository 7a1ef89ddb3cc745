// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "heact/cli.hpp"

int main(int argc, char** argv) { return heact::cli::run(argc, argv, std::cout, std::cerr); }
