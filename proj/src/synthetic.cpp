// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/synthetic.hpp"

#include <random>
#include <string_view>

#include "conversum/text.hpp"

namespace conversum::synthetic {
namespace {

constexpr std::string_view kSalientLetters = "abcdefghijklm";
constexpr std::string_view kFillerLetters = "nopqrstuvwxyz";
constexpr std::size_t kSalientPool = 400;
constexpr std::size_t kFillerPool = 8;

// Raw engine arithmetic keeps the task identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::string make_word(Rng& rng, std::string_view letters) {
  std::size_t length = 4 + rng.below(5);
  std::string word;
  for (std::size_t i = 0; i < length; ++i) word.push_back(letters[rng.below(letters.size())]);
  return word;
}

std::vector<std::string> make_pool(Rng& rng, std::string_view letters, std::size_t size) {
  std::vector<std::string> pool;
  for (std::size_t i = 0; i < size; ++i) pool.push_back(make_word(rng, letters));
  return pool;
}

std::string make_sentence(Rng& rng, const std::vector<std::string>& words, std::size_t length) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < length; ++i) tokens.push_back(words[rng.below(words.size())]);
  return join(tokens, " ") + ".";
}

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.below(i)]);
}

}  // namespace

std::vector<ToyDocument> make_toy_task(const ToyTaskConfig& config) {
  Rng rng(config.seed);
  auto salient_pool = make_pool(rng, kSalientLetters, kSalientPool);
  auto filler = make_pool(rng, kFillerLetters, kFillerPool);

  std::vector<ToyDocument> documents;
  documents.reserve(config.num_documents);
  for (std::size_t d = 0; d < config.num_documents; ++d) {
    std::vector<std::string> salient;
    for (std::size_t i = 0; i < config.salient_words_per_document; ++i) {
      salient.push_back(salient_pool[rng.below(salient_pool.size())]);
    }

    std::vector<std::string> sentences;
    for (std::size_t i = 0; i < config.salient_sentences; ++i) {
      sentences.push_back(make_sentence(rng, salient, config.words_per_sentence));
    }
    for (std::size_t i = 0; i < config.filler_sentences; ++i) {
      sentences.push_back(make_sentence(rng, filler, config.words_per_sentence));
    }
    shuffle(sentences, rng);

    ToyDocument doc;
    doc.record.id = "toy-" + std::to_string(d);
    doc.record.text = join(sentences, " ");
    std::vector<std::string> reference;
    for (std::size_t i = 0; i < config.reference_words; ++i) {
      reference.push_back(salient[i % salient.size()]);
    }
    shuffle(reference, rng);
    doc.record.summary = join(reference, " ") + ".";
    doc.record.source_lang = config.language;
    doc.record.target_lang = config.language;
    doc.record.split = Split::train;

    doc.candidates.document_id = doc.record.id;
    doc.candidates.config_fingerprint = "toy";
    for (std::size_t k = 0; k < config.num_candidates; ++k) {
      std::size_t salient_count = k * config.candidate_words / config.num_candidates;
      std::vector<std::string> tokens;
      std::size_t offset = rng.below(salient.size());
      for (std::size_t i = 0; i < salient_count; ++i) {
        tokens.push_back(salient[(offset + i) % salient.size()]);
      }
      while (tokens.size() < config.candidate_words) {
        tokens.push_back(filler[rng.below(filler.size())]);
      }
      shuffle(tokens, rng);
      CandidateSummary candidate;
      candidate.text = join(tokens, " ") + ".";
      candidate.language = config.language;
      candidate.group_index = k;
      doc.candidates.candidates.push_back(std::move(candidate));
    }
    shuffle(doc.candidates.candidates, rng);
    for (std::size_t k = 0; k < doc.candidates.candidates.size(); ++k) {
      doc.candidates.candidates[k].group_index = k;
    }
    documents.push_back(std::move(doc));
  }
  return documents;
}

}  // namespace conversum::synthetic
