// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/cli.hpp"

int main(int argc, char** argv) { return conversum::run_cli(argc, argv); }
