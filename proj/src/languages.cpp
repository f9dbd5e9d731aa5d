// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/languages.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace conversum {
namespace {

constexpr std::array<Language, 45> kRegistry = {{
    {"amharic", "Amharic", "am"},
    {"arabic", "Arabic", "ar"},
    {"azerbaijani", "Azerbaijani", "az"},
    {"bengali", "Bengali", "bn"},
    {"burmese", "Burmese", "my"},
    {"chinese_simplified", "Chinese_simplified", "zh-CN"},
    {"chinese_traditional", "Chinese_traditional", "zh-TW"},
    {"english", "English", "en"},
    {"french", "French", "fr"},
    {"gujarati", "Gujarati", "gu"},
    {"hausa", "Hausa", "ha"},
    {"hindi", "Hindi", "hi"},
    {"igbo", "Igbo", "ig"},
    {"indonesian", "Indonesian", "id"},
    {"japanese", "Japanese", "ja"},
    {"kirundi", "Kirundi", "rn"},
    {"korean", "Korean", "ko"},
    {"kyrgyz", "Kyrgyz", "ky"},
    {"marathi", "Marathi", "mr"},
    {"nepali", "Nepali", "ne"},
    {"oromo", "Oromo", "om"},
    {"pashto", "Pashto", "ps"},
    {"persian", "Persian", "fa"},
    {"pidgin", "Pidgin", "pcm"},
    {"portuguese", "Portuguese", "pt"},
    {"punjabi", "Punjabi", "pa"},
    {"russian", "Russian", "ru"},
    {"scottish_gaelic", "Scottish_gaelic", "gd"},
    {"serbian_cyrillic", "Serbian_cyrillic", "sr-Cyrl"},
    {"serbian_latin", "Serbian_latin", "sr-Latn"},
    {"sinhala", "Sinhala", "si"},
    {"somali", "Somali", "so"},
    {"spanish", "Spanish", "es"},
    {"swahili", "Swahili", "sw"},
    {"tamil", "Tamil", "ta"},
    {"telugu", "Telugu", "te"},
    {"thai", "Thai", "th"},
    {"tigrinya", "Tigrinya", "ti"},
    {"turkish", "Turkish", "tr"},
    {"ukrainian", "Ukrainian", "uk"},
    {"urdu", "Urdu", "ur"},
    {"uzbek", "Uzbek", "uz"},
    {"vietnamese", "Vietnamese", "vi"},
    {"welsh", "Welsh", "cy"},
    {"yoruba", "Yoruba", "yo"},
}};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::span<const Language> language_registry() { return kRegistry; }

std::optional<Language> find_language(std::string_view tag_or_code) {
  for (const auto& language : kRegistry) {
    if (iequals(language.tag, tag_or_code) || iequals(language.iso_code, tag_or_code)) {
      return language;
    }
  }
  return std::nullopt;
}

std::optional<std::string> canonical_language(std::string_view tag_or_code) {
  if (auto language = find_language(tag_or_code)) return std::string(language->tag);
  return std::nullopt;
}

bool is_registered_language(std::string_view tag_or_code) {
  return find_language(tag_or_code).has_value();
}

std::string display_name(std::string_view tag) {
  if (auto language = find_language(tag)) return std::string(language->display_name);
  std::string out(tag);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

}  // namespace conversum
