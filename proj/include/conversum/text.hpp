// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace conversum {

std::string_view trim(std::string_view text);
bool is_blank(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);
std::string join(std::span<const std::string> parts, std::string_view separator);

// Sentences are maximal runs of whitespace tokens ending in a token whose
// last character is a terminator (. ! ? and the Devanagari/Bengali danda,
// ideographic full stop). Trailing tokens without a terminator form a final
// sentence. Sentences come back whitespace-normalized.
std::vector<std::string> split_sentences(std::string_view text);

// UTF-8 code points of `text`, each as its own byte string. Invalid lead
// bytes are passed through as single-byte units.
std::vector<std::string> utf8_code_points(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t state);

// Fixed-point rendering, e.g. format_fixed(0.38864, 4) == "0.3886".
std::string format_fixed(double value, int decimals);
// Same, with an explicit leading '+' for non-negative values.
std::string format_signed(double value, int decimals);

std::string to_hex(std::uint64_t value);

// Token accounting used for length caps and length penalties.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;

  std::size_t count(std::string_view text) const { return tokenize(text).size(); }

  // First `max_tokens` tokens re-joined with single spaces.
  virtual std::string truncate(std::string_view text, std::size_t max_tokens) const;
};

class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view text) const override;
};

}  // namespace conversum
