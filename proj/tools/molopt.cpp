//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/cli.hpp"

int main(int argc, char** argv) { return molopt::cli::main(argc, argv); }
