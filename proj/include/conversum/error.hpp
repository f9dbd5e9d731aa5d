// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace conversum {

// Root of every exception thrown by the library. Module-specific errors
// derive from it and carry a `kind()` enum so callers can branch without
// string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace conversum
