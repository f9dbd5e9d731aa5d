// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace conversum {

struct Language {
  std::string_view tag;           // canonical lowercase name, e.g. "chinese_simplified"
  std::string_view display_name;  // as printed in prompts and tables, e.g. "Chinese_simplified"
  std::string_view iso_code;      // ISO-639 code accepted as an alias, e.g. "zh-CN"
};

// The 45 registered languages in their canonical order.
std::span<const Language> language_registry();

// Looks up a canonical tag or ISO-639 alias (case-insensitive).
std::optional<Language> find_language(std::string_view tag_or_code);

// Canonical tag for a registered tag or alias; nullopt when unregistered.
std::optional<std::string> canonical_language(std::string_view tag_or_code);

bool is_registered_language(std::string_view tag_or_code);

// Display name for a registered language; unregistered tags are returned
// with their first letter upper-cased.
std::string display_name(std::string_view tag);

}  // namespace conversum
