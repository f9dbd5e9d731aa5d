// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "conversum/generation.hpp"

namespace conversum {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr std::size_t kMaxStemLength = 160;

std::string encode_file_stem(std::string_view id) {
  std::string out;
  for (unsigned char c : id) {
    bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                c == '-' || c == '_' || c == '.';
    if (safe) {
      out.push_back(static_cast<char>(c));
    } else {
      char buffer[4];
      std::snprintf(buffer, sizeof(buffer), "%%%02X", c);
      out.append(buffer);
    }
  }
  if (out.size() > kMaxStemLength || out.empty() || out.front() == '.') {
    return "id-" + to_hex(fnv1a64(id));
  }
  return out;
}

}  // namespace

CandidateCache::CandidateCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path CandidateCache::path_for(std::string_view document_id,
                                  std::string_view config_fingerprint) const {
  return dir_ / (encode_file_stem(document_id) + "." + std::string(config_fingerprint) + ".json");
}

fs::path CandidateCache::store(const CandidateSet& set) const {
  static std::atomic<unsigned> counter{0};
  fs::create_directories(dir_);
  fs::path target = path_for(set.document_id, set.config_fingerprint);
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id() << "." << counter++;
  fs::path temp = target;
  temp += suffix.str();
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw GenerationError(GenerationError::Kind::corrupt_cache,
                            "cannot write " + temp.string());
    }
    out << to_json(set).dump(2) << '\n';
  }
  fs::rename(temp, target);
  return target;
}

std::optional<CandidateSet> CandidateCache::load(std::string_view document_id,
                                                 std::string_view config_fingerprint) const {
  fs::path path = path_for(document_id, config_fingerprint);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    CandidateSet set = candidate_set_from_json(json::parse(in));
    if (set.document_id != document_id || set.config_fingerprint != config_fingerprint) {
      return std::nullopt;
    }
    return set;
  } catch (const json::exception& e) {
    throw GenerationError(GenerationError::Kind::corrupt_cache, path.string() + ": " + e.what());
  }
}

}  // namespace conversum
