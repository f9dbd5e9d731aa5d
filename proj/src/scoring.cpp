// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace conversum {
namespace {

void require_same_dim(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw ScoringError(ScoringError::Kind::dimension_mismatch,
                       std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

double require_nonzero_norm(const EmbeddingVector& v) {
  double n = v.norm();
  if (!(n > 0.0)) throw ScoringError(ScoringError::Kind::zero_vector, "zero-norm embedding");
  return n;
}

}  // namespace

ScoringError::ScoringError(Kind kind, std::string detail)
    : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

std::string_view to_string(ScoringError::Kind kind) {
  switch (kind) {
    case ScoringError::Kind::encoder_failure: return "EncoderFailure";
    case ScoringError::Kind::empty_text: return "EmptyText";
    case ScoringError::Kind::dimension_mismatch: return "DimensionMismatch";
    case ScoringError::Kind::zero_vector: return "ZeroVector";
    case ScoringError::Kind::lang_id_failure: return "LangIdFailure";
  }
  return "ScoringError";
}

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  for (double x : values_) {
    if (!std::isfinite(x)) {
      throw ScoringError(ScoringError::Kind::encoder_failure, "non-finite embedding entry");
    }
  }
}

double EmbeddingVector::norm() const { return std::sqrt(dot(*this)); }

double EmbeddingVector::dot(const EmbeddingVector& other) const {
  require_same_dim(*this, other);
  return std::inner_product(values_.begin(), values_.end(), other.values_.begin(), 0.0);
}

StubEncoder::StubEncoder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw ScoringError(ScoringError::Kind::encoder_failure, "dimension must be > 0");
}

std::vector<double> StubEncoder::embed(std::string_view text) const {
  std::vector<double> out(dim_, 0.0);
  auto add_gram = [&](std::string_view gram) {
    std::uint64_t h = fnv1a64(gram);
    for (std::size_t k = 0; k < dim_; ++k) {
      double unit = static_cast<double>(splitmix64(h + k) >> 11) * 0x1.0p-53;
      out[k] += 2.0 * unit - 1.0;
    }
  };
  auto points = utf8_code_points(text);
  if (points.size() < 3) {
    add_gram(text);
  } else {
    for (std::size_t i = 0; i + 2 < points.size(); ++i) {
      add_gram(points[i] + points[i + 1] + points[i + 2]);
    }
  }
  return out;
}

std::vector<double> EncoderDispatch::embed(std::string_view text) const {
  if (backend_.thread_safe()) return backend_.embed(text);
  std::lock_guard lock(mutex_);
  return backend_.embed(text);
}

StubLanguageIdentifier::StubLanguageIdentifier(double untagged_confidence)
    : untagged_confidence_(untagged_confidence) {}

double StubLanguageIdentifier::confidence(std::string_view text, std::string_view language) const {
  auto tag = leading_language_tag(text);
  if (!tag) return untagged_confidence_;
  return *tag == language ? 1.0 : 0.0;
}

std::optional<std::string> leading_language_tag(std::string_view text) {
  text = trim(text);
  if (text.size() < 3 || text.front() != '[') return std::nullopt;
  auto close = text.find(']');
  if (close == std::string_view::npos || close < 2) return std::nullopt;
  if (close + 1 < text.size() && text[close + 1] != ' ' && text[close + 1] != '\t' &&
      text[close + 1] != '\n') {
    return std::nullopt;
  }
  return std::string(text.substr(1, close - 1));
}

EmbeddingVector encode(std::string_view text, const Encoder& encoder) {
  if (is_blank(text)) throw ScoringError(ScoringError::Kind::empty_text, "cannot encode empty text");
  std::vector<double> raw;
  try {
    raw = encoder.embed(text);
  } catch (const ScoringError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScoringError(ScoringError::Kind::encoder_failure, encoder.name() + ": " + e.what());
  }
  if (raw.size() != encoder.dim()) {
    throw ScoringError(ScoringError::Kind::encoder_failure,
                       encoder.name() + " returned dimension " + std::to_string(raw.size()));
  }
  double norm = 0.0;
  for (double x : raw) {
    if (!std::isfinite(x)) {
      throw ScoringError(ScoringError::Kind::encoder_failure, "non-finite embedding entry");
    }
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) {
    throw ScoringError(ScoringError::Kind::encoder_failure, "encoder returned a zero vector");
  }
  for (double& x : raw) x /= norm;
  return EmbeddingVector(std::move(raw));
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  require_same_dim(u, v);
  double nu = require_nonzero_norm(u);
  double nv = require_nonzero_norm(v);
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

double tri_similarity(const EmbeddingVector& candidate, const EmbeddingVector& reference,
                      const EmbeddingVector& source) {
  require_same_dim(candidate, source);
  require_same_dim(reference, source);
  double nc = require_nonzero_norm(candidate);
  double nr = require_nonzero_norm(reference);
  double ns = require_nonzero_norm(source);
  return (candidate.dot(source) + reference.dot(source)) / (nc * ns + nr * ns);
}

double length_penalty(std::size_t prediction_tokens, std::size_t reference_tokens) {
  if (prediction_tokens >= reference_tokens) return 1.0;
  if (prediction_tokens == 0) return 0.0;
  return std::exp(1.0 - static_cast<double>(reference_tokens) /
                            static_cast<double>(prediction_tokens));
}

LaSEScore compose_lase(double meaning_similarity, double language_confidence,
                       double length_penalty) {
  LaSEScore score;
  score.meaning_similarity = meaning_similarity;
  score.language_confidence = language_confidence;
  score.length_penalty = length_penalty;
  score.value = meaning_similarity * language_confidence * length_penalty;
  return score;
}

LaSEScore lase(std::string_view prediction, std::string_view reference,
               std::string_view target_lang, const ScoringBackends& backends) {
  if (is_blank(prediction) || is_blank(reference)) {
    throw ScoringError(ScoringError::Kind::empty_text, "LaSE needs non-empty texts");
  }
  return lase(prediction, encode(prediction, backends.encoder), reference,
              encode(reference, backends.encoder), target_lang, backends);
}

LaSEScore lase(std::string_view prediction, const EmbeddingVector& prediction_embedding,
               std::string_view reference, const EmbeddingVector& reference_embedding,
               std::string_view target_lang, const ScoringBackends& backends) {
  if (is_blank(prediction) || is_blank(reference)) {
    throw ScoringError(ScoringError::Kind::empty_text, "LaSE needs non-empty texts");
  }
  double ms = std::clamp(cosine_similarity(prediction_embedding, reference_embedding), 0.0, 1.0);
  double lc = 0.0;
  try {
    lc = backends.lang_id.confidence(prediction, target_lang);
  } catch (const std::exception& e) {
    throw ScoringError(ScoringError::Kind::lang_id_failure, backends.lang_id.name() + ": " + e.what());
  }
  if (!(lc >= 0.0 && lc <= 1.0)) {
    throw ScoringError(ScoringError::Kind::lang_id_failure,
                       backends.lang_id.name() + " returned a non-probability");
  }
  double lp = length_penalty(backends.tokenizer.count(prediction),
                             backends.tokenizer.count(reference));
  return compose_lase(ms, lc, lp);
}

std::vector<std::size_t> descending_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

RankedDocument rank_candidates(const CandidateSet& set, std::string_view document,
                               std::string_view reference, std::string_view target_lang,
                               const ScoringBackends& backends) {
  RankedDocument ranked;
  ranked.document_id = set.document_id;
  ranked.document_embedding = encode(document, backends.encoder);
  ranked.reference_embedding = encode(reference, backends.encoder);

  std::vector<ScoredCandidate> scored;
  std::vector<double> values;
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    ScoredCandidate s;
    s.candidate = set.candidates[i];
    s.original_index = i;
    s.embedding = encode(s.candidate.text, backends.encoder);
    s.lase = lase(s.candidate.text, s.embedding, reference, ranked.reference_embedding,
                  target_lang, backends);
    s.tri_similarity =
        tri_similarity(s.embedding, ranked.reference_embedding, ranked.document_embedding);
    values.push_back(s.lase.value);
    scored.push_back(std::move(s));
  }
  auto order = descending_order(values);
  for (std::size_t r = 0; r < order.size(); ++r) {
    ScoredCandidate s = std::move(scored[order[r]]);
    s.rank = r + 1;
    ranked.candidates.push_back(std::move(s));
  }
  return ranked;
}

nlohmann::json scored_candidate_to_json(std::string_view document_id,
                                        const ScoredCandidate& scored) {
  return nlohmann::json{{"document_id", document_id},
                        {"candidate_text", scored.candidate.text},
                        {"language", scored.candidate.language},
                        {"lase",
                         {{"ms", scored.lase.meaning_similarity},
                          {"lc", scored.lase.language_confidence},
                          {"lp", scored.lase.length_penalty},
                          {"value", scored.lase.value}}},
                        {"tri_similarity", scored.tri_similarity},
                        {"rank", scored.rank}};
}

}  // namespace conversum
