// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/text.hpp"

#include <array>
#include <cmath>
#include <cstdio>

namespace conversum {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

constexpr std::array<std::string_view, 7> kTerminators = {
    ".", "!", "?", "।", "॥", "。", "።"};

bool ends_sentence(std::string_view token) {
  for (auto terminator : kTerminators) {
    if (token.size() >= terminator.size() &&
        token.substr(token.size() - terminator.size()) == terminator) {
      return true;
    }
  }
  return false;
}

std::size_t utf8_sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 1;
}

}  // namespace

std::string_view trim(std::string_view text) {
  std::size_t begin = 0;
  while (begin < text.size() && is_space(text[begin])) ++begin;
  std::size_t end = text.size();
  while (end > begin && is_space(text[end - 1])) --end;
  return text.substr(begin, end - begin);
}

bool is_blank(std::string_view text) { return trim(text).empty(); }

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string join(std::span<const std::string> parts, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(separator);
    out.append(parts[i]);
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::vector<std::string> current;
  for (auto& token : split_whitespace(text)) {
    bool last = ends_sentence(token);
    current.push_back(std::move(token));
    if (last) {
      sentences.push_back(join(current, " "));
      current.clear();
    }
  }
  if (!current.empty()) sentences.push_back(join(current, " "));
  return sentences;
}

std::vector<std::string> utf8_code_points(std::string_view text) {
  std::vector<std::string> points;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = utf8_sequence_length(static_cast<unsigned char>(text[i]));
    if (i + len > text.size()) len = 1;
    points.emplace_back(text.substr(i, len));
    i += len;
  }
  return points;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string format_fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  std::string out(buffer);
  // "-0.0000" renders as "0.0000".
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

std::string format_signed(double value, int decimals) {
  std::string out = format_fixed(value, decimals);
  if (out.front() != '-') out.insert(out.begin(), '+');
  return out;
}

std::string to_hex(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

std::string Tokenizer::truncate(std::string_view text, std::size_t max_tokens) const {
  auto tokens = tokenize(text);
  if (tokens.size() > max_tokens) tokens.resize(max_tokens);
  return join(tokens, " ");
}

std::vector<std::string> WhitespaceTokenizer::tokenize(std::string_view text) const {
  return split_whitespace(text);
}

}  // namespace conversum
