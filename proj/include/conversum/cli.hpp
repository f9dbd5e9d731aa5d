// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace conversum {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `conversum` tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv);
// Same, with argv[0] supplied implicitly.
int run_cli(const std::vector<std::string>& args);

}  // namespace conversum
