// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "conversum/corpus.hpp"
#include "conversum/error.hpp"
#include "conversum/text.hpp"

namespace conversum {

struct GenerationConfig {
  std::size_t num_candidates = 8;
  std::size_t num_beam_groups = 8;
  std::size_t max_length = 80;  // tokens, counted by the backend tokenizer
  double diversity_penalty = 1.0;
  // Languages cycled over beam groups. Empty means "the record's target".
  std::vector<std::string> target_languages;
  std::uint64_t seed = 0;
  std::size_t batch_size = 2;

  // Throws GenerationError(invalid_config).
  void validate() const;

  nlohmann::json to_json() const;
  static GenerationConfig from_json(const nlohmann::json& j);

  // Stable hash of the canonical (key-sorted, compact) JSON form.
  std::string fingerprint() const;
};

struct CandidateSummary {
  std::string text;
  std::string language;
  std::size_t group_index = 0;
  std::optional<double> backend_score;

  bool operator==(const CandidateSummary&) const = default;
};

struct CandidateSet {
  std::string document_id;
  std::vector<CandidateSummary> candidates;
  std::string config_fingerprint;

  bool operator==(const CandidateSet&) const = default;
};

nlohmann::json to_json(const CandidateSet& set);
CandidateSet candidate_set_from_json(const nlohmann::json& j);

class GenerationError : public Error {
 public:
  enum class Kind { backend_failure, degenerate_output, corrupt_cache, invalid_config };

  GenerationError(Kind kind, std::string detail);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(GenerationError::Kind kind);

// One diverse-beam decoding call. group_languages[g] is the target-language
// control token forced for beam group g.
struct BeamRequest {
  std::string_view document;
  std::vector<std::string> group_languages;
  double diversity_penalty = 1.0;
  std::size_t max_length = 80;
  std::uint64_t seed = 0;
};

struct Hypothesis {
  std::string text;
  double score = 0.0;
};

// Conditional generation backend. generate() returns one hypothesis list per
// beam group, best first; entries after the first are the "next-best" beams
// used when de-duplicating.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::vector<Hypothesis>> generate(const BeamRequest& request) const = 0;
  virtual const Tokenizer& tokenizer() const = 0;
  virtual bool thread_safe() const { return false; }
};

// Deterministic test double. Group g selects every (g+1)-th sentence of the
// document starting from the first, prefixes the language token "[lang]"
// and truncates to max_length whitespace tokens (tag included). Alternate
// beams drop one more trailing token each.
class StubGenerator final : public GeneratorBackend {
 public:
  std::string name() const override { return "stub"; }
  std::vector<std::vector<Hypothesis>> generate(const BeamRequest& request) const override;
  const Tokenizer& tokenizer() const override { return tokenizer_; }
  bool thread_safe() const override { return true; }

 private:
  WhitespaceTokenizer tokenizer_;
};

// "[bengali]" for "bengali".
std::string language_token(std::string_view language);

// Language assigned to each beam group: target_languages cycled over group
// indices, or the record's target language when the list is empty.
std::vector<std::string> assign_group_languages(const GenerationConfig& config,
                                                const DocumentRecord& record);

// Runs the backend and enforces the candidate-set contract: exactly
// num_candidates candidates, each within max_length tokens, pairwise
// distinct. Duplicates trigger up to two regenerations with the diversity
// penalty raised by 0.5 each time; remaining duplicates are replaced with the
// group's next-best distinct beam. Throws GenerationError.
CandidateSet generate_candidates(const DocumentRecord& record, const GenerationConfig& config,
                                 const GeneratorBackend& backend);

CandidateSet stub_generate(const DocumentRecord& record, const GenerationConfig& config);

// Generates for every record on up to `workers` threads (one worker when the
// backend is not thread-safe). Output order follows input order.
std::vector<CandidateSet> generate_all(std::span<const DocumentRecord> records,
                                       const GenerationConfig& config,
                                       const GeneratorBackend& backend, std::size_t workers);

// One JSON file per (document_id, config_fingerprint). Writes go to a
// temporary file that is renamed into place.
class CandidateCache {
 public:
  explicit CandidateCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(std::string_view document_id,
                                 std::string_view config_fingerprint) const;

  // Returns the cache key (file path).
  std::filesystem::path store(const CandidateSet& set) const;

  // nullopt when no entry exists for the key; GenerationError(corrupt_cache)
  // when the file exists but cannot be parsed.
  std::optional<CandidateSet> load(std::string_view document_id,
                                   std::string_view config_fingerprint) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace conversum
