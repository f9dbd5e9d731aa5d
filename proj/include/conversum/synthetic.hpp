// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "conversum/corpus.hpp"
#include "conversum/generation.hpp"

namespace conversum::synthetic {

// Desk-scale re-ranking task. Every document mixes a few "salient" sentences,
// written with document-specific words, into a majority of boilerplate filler
// drawn from a small shared vocabulary. The reference summary uses only the
// salient words, each equally often; candidate k of n carries roughly k/n
// salient words cycled in a random order, the rest filler. Ranking candidates by similarity to the whole
// document therefore favours filler-heavy candidates, while LaSE against the
// reference favours salient-heavy ones: a scorer has to learn to discount the
// filler subspace.
struct ToyTaskConfig {
  std::size_t num_documents = 200;
  std::size_t num_candidates = 8;
  std::size_t salient_words_per_document = 3;
  std::size_t salient_sentences = 3;
  std::size_t filler_sentences = 9;
  std::size_t words_per_sentence = 8;
  std::size_t reference_words = 12;
  std::size_t candidate_words = 16;
  std::string language = "english";
  std::uint64_t seed = 0;
};

struct ToyDocument {
  DocumentRecord record;
  CandidateSet candidates;
};

std::vector<ToyDocument> make_toy_task(const ToyTaskConfig& config);

}  // namespace conversum::synthetic
