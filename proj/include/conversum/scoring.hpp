// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "conversum/error.hpp"
#include "conversum/generation.hpp"
#include "conversum/text.hpp"

namespace conversum {

class ScoringError : public Error {
 public:
  enum class Kind { encoder_failure, empty_text, dimension_mismatch, zero_vector, lang_id_failure };

  ScoringError(Kind kind, std::string detail);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(ScoringError::Kind kind);

// Dense sentence embedding. Entries are always finite.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const;
  double dot(const EmbeddingVector& other) const;

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<double> values_;
};

class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  // Raw (not necessarily normalized) sentence embedding of dimension dim().
  virtual std::vector<double> embed(std::string_view text) const = 0;
  virtual bool thread_safe() const { return false; }
};

// Hashed bag of character trigrams. Each trigram (three consecutive UTF-8
// code points; texts shorter than three code points form a single gram) is
// hashed with FNV-1a-64 to h, and contributes the fixed pseudo-random vector
//   x_k = 2 * (splitmix64(h + k) >> 11) * 2^-53 - 1,   k = 0..dim-1.
class StubEncoder final : public Encoder {
 public:
  explicit StubEncoder(std::size_t dim = 16);

  std::string name() const override { return "stub-trigram"; }
  std::size_t dim() const override { return dim_; }
  std::vector<double> embed(std::string_view text) const override;
  bool thread_safe() const override { return true; }

 private:
  std::size_t dim_;
};

// Serializes calls into an encoder that is not thread-safe so that scoring
// can run on a worker pool regardless of backend.
class EncoderDispatch final : public Encoder {
 public:
  explicit EncoderDispatch(const Encoder& backend) : backend_(backend) {}

  std::string name() const override { return backend_.name(); }
  std::size_t dim() const override { return backend_.dim(); }
  std::vector<double> embed(std::string_view text) const override;
  bool thread_safe() const override { return true; }

 private:
  const Encoder& backend_;
  mutable std::mutex mutex_;
};

class LanguageIdentifier {
 public:
  virtual ~LanguageIdentifier() = default;

  virtual std::string name() const = 0;
  // Probability in [0, 1] that `text` is written in `language`.
  virtual double confidence(std::string_view text, std::string_view language) const = 0;
};

// Reads the leading "[lang]" token written by the stub generator: 1.0 when it
// names `language`, 0.0 when it names another language. Untagged text gets
// `untagged_confidence`.
class StubLanguageIdentifier final : public LanguageIdentifier {
 public:
  explicit StubLanguageIdentifier(double untagged_confidence = 1.0);

  std::string name() const override { return "stub-tag"; }
  double confidence(std::string_view text, std::string_view language) const override;

 private:
  double untagged_confidence_;
};

// Language named by a leading "[lang]" token, if any.
std::optional<std::string> leading_language_tag(std::string_view text);

struct ScoringBackends {
  const Encoder& encoder;
  const LanguageIdentifier& lang_id;
  const Tokenizer& tokenizer;
};

// L2-normalized embedding of `text`.
EmbeddingVector encode(std::string_view text, const Encoder& encoder);

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

// (C·S + R·S) / (|C||S| + |R||S|), relating a candidate C and reference R
// jointly to the source document S.
double tri_similarity(const EmbeddingVector& candidate, const EmbeddingVector& reference,
                      const EmbeddingVector& source);

struct LaSEScore {
  double meaning_similarity = 0.0;
  double language_confidence = 0.0;
  double length_penalty = 1.0;
  double value = 0.0;

  bool operator==(const LaSEScore&) const = default;
};

// 1 when the prediction is at least as long as the reference, otherwise
// exp(1 - reference_tokens / prediction_tokens).
double length_penalty(std::size_t prediction_tokens, std::size_t reference_tokens);

LaSEScore compose_lase(double meaning_similarity, double language_confidence,
                       double length_penalty);

LaSEScore lase(std::string_view prediction, std::string_view reference,
               std::string_view target_lang, const ScoringBackends& backends);

// Same, reusing a precomputed reference embedding.
LaSEScore lase(std::string_view prediction, const EmbeddingVector& prediction_embedding,
               std::string_view reference, const EmbeddingVector& reference_embedding,
               std::string_view target_lang, const ScoringBackends& backends);

struct ScoredCandidate {
  CandidateSummary candidate;
  std::size_t original_index = 0;
  LaSEScore lase;
  double tri_similarity = 0.0;
  std::size_t rank = 0;  // 1 = best
  EmbeddingVector embedding;
};

// A candidate set after scoring, candidates in rank order.
struct RankedDocument {
  std::string document_id;
  EmbeddingVector document_embedding;
  EmbeddingVector reference_embedding;
  std::vector<ScoredCandidate> candidates;
};

// Stable descending argsort: ties keep the lower index first.
std::vector<std::size_t> descending_order(std::span<const double> values);

RankedDocument rank_candidates(const CandidateSet& set, std::string_view document,
                               std::string_view reference, std::string_view target_lang,
                               const ScoringBackends& backends);

nlohmann::json scored_candidate_to_json(std::string_view document_id,
                                        const ScoredCandidate& scored);

}  // namespace conversum
