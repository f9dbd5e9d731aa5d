// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/generation.hpp"

#include <cmath>
#include <set>

#include "conversum/languages.hpp"
#include "conversum/parallel.hpp"

namespace conversum {
namespace {

using json = nlohmann::json;

constexpr int kMaxRegenerations = 2;
constexpr double kPenaltyIncrement = 0.5;
constexpr std::size_t kStubAlternates = 15;

}  // namespace

GenerationError::GenerationError(Kind kind, std::string detail)
    : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

std::string_view to_string(GenerationError::Kind kind) {
  switch (kind) {
    case GenerationError::Kind::backend_failure: return "BackendFailure";
    case GenerationError::Kind::degenerate_output: return "DegenerateOutput";
    case GenerationError::Kind::corrupt_cache: return "CorruptCache";
    case GenerationError::Kind::invalid_config: return "InvalidGenerationConfig";
  }
  return "GenerationError";
}

void GenerationConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw GenerationError(GenerationError::Kind::invalid_config, what);
  };
  if (num_candidates < 1) fail("num_candidates must be >= 1");
  if (num_beam_groups < 1) fail("num_beam_groups must be >= 1");
  if (num_candidates != num_beam_groups) {
    fail("num_candidates must equal num_beam_groups (one candidate per group)");
  }
  if (max_length < 1) fail("max_length must be >= 1");
  if (!std::isfinite(diversity_penalty) || diversity_penalty < 0.0) {
    fail("diversity_penalty must be a non-negative finite number");
  }
  if (batch_size < 1) fail("batch_size must be >= 1");
  for (const auto& language : target_languages) {
    if (!is_registered_language(language)) fail("unregistered target language '" + language + "'");
  }
}

json GenerationConfig::to_json() const {
  return json{{"num_candidates", num_candidates},
              {"num_beam_groups", num_beam_groups},
              {"max_length", max_length},
              {"diversity_penalty", diversity_penalty},
              {"target_languages", target_languages},
              {"seed", seed},
              {"batch_size", batch_size}};
}

GenerationConfig GenerationConfig::from_json(const json& j) {
  GenerationConfig config;
  config.num_candidates = j.value("num_candidates", config.num_candidates);
  config.num_beam_groups = j.value("num_beam_groups", config.num_beam_groups);
  config.max_length = j.value("max_length", config.max_length);
  config.diversity_penalty = j.value("diversity_penalty", config.diversity_penalty);
  config.target_languages = j.value("target_languages", config.target_languages);
  config.seed = j.value("seed", config.seed);
  config.batch_size = j.value("batch_size", config.batch_size);
  return config;
}

std::string GenerationConfig::fingerprint() const {
  // batch_size only affects throughput, never the candidates.
  json canonical = to_json();
  canonical.erase("batch_size");
  return to_hex(fnv1a64(canonical.dump()));
}

json to_json(const CandidateSet& set) {
  json candidates = json::array();
  for (const auto& c : set.candidates) {
    json entry = {{"text", c.text}, {"language", c.language}, {"group_index", c.group_index}};
    entry["backend_score"] = c.backend_score ? json(*c.backend_score) : json(nullptr);
    candidates.push_back(std::move(entry));
  }
  return json{{"document_id", set.document_id},
              {"config_fingerprint", set.config_fingerprint},
              {"candidates", std::move(candidates)}};
}

CandidateSet candidate_set_from_json(const json& j) {
  CandidateSet set;
  set.document_id = j.at("document_id").get<std::string>();
  set.config_fingerprint = j.at("config_fingerprint").get<std::string>();
  for (const auto& entry : j.at("candidates")) {
    CandidateSummary c;
    c.text = entry.at("text").get<std::string>();
    c.language = entry.at("language").get<std::string>();
    c.group_index = entry.at("group_index").get<std::size_t>();
    if (entry.contains("backend_score") && !entry["backend_score"].is_null()) {
      c.backend_score = entry["backend_score"].get<double>();
    }
    set.candidates.push_back(std::move(c));
  }
  return set;
}

std::string language_token(std::string_view language) {
  return "[" + std::string(language) + "]";
}

std::vector<std::vector<Hypothesis>> StubGenerator::generate(const BeamRequest& request) const {
  auto sentences = split_sentences(request.document);
  if (sentences.empty()) {
    throw GenerationError(GenerationError::Kind::backend_failure, "empty document");
  }
  const std::size_t body_cap = request.max_length > 0 ? request.max_length - 1 : 0;

  std::vector<std::vector<Hypothesis>> groups;
  groups.reserve(request.group_languages.size());
  for (std::size_t g = 0; g < request.group_languages.size(); ++g) {
    std::vector<std::string> body;
    for (std::size_t s = 0; s < sentences.size(); s += g + 1) {
      for (auto& token : split_whitespace(sentences[s])) body.push_back(std::move(token));
    }
    if (body.size() > body_cap) body.resize(body_cap);

    // Score depends only on (seed, group, alternate rank): higher is better.
    double jitter = static_cast<double>(splitmix64(request.seed * 1000003ULL + g) >> 11) * 0x1.0p-53;
    std::string tag = language_token(request.group_languages[g]);
    std::vector<Hypothesis> beams;
    for (std::size_t k = 0; k <= kStubAlternates; ++k) {
      if (k > 0 && k >= body.size()) break;
      std::vector<std::string> tokens{tag};
      tokens.insert(tokens.end(), body.begin(), body.end() - static_cast<std::ptrdiff_t>(k));
      beams.push_back({join(tokens, " "), -static_cast<double>(g) - 0.1 * k - 1e-3 * jitter});
    }
    groups.push_back(std::move(beams));
  }
  return groups;
}

std::vector<std::string> assign_group_languages(const GenerationConfig& config,
                                                const DocumentRecord& record) {
  std::vector<std::string> languages;
  languages.reserve(config.num_beam_groups);
  for (std::size_t g = 0; g < config.num_beam_groups; ++g) {
    if (config.target_languages.empty()) {
      languages.push_back(record.target_lang);
    } else {
      const auto& tag = config.target_languages[g % config.target_languages.size()];
      languages.push_back(canonical_language(tag).value_or(tag));
    }
  }
  return languages;
}

CandidateSet generate_candidates(const DocumentRecord& record, const GenerationConfig& config,
                                 const GeneratorBackend& backend) {
  config.validate();
  if (is_blank(record.text)) {
    throw GenerationError(GenerationError::Kind::backend_failure,
                          "document '" + record.id + "' has empty text");
  }
  const Tokenizer& tokenizer = backend.tokenizer();

  BeamRequest request;
  request.document = record.text;
  request.group_languages = assign_group_languages(config, record);
  request.diversity_penalty = config.diversity_penalty;
  request.max_length = config.max_length;
  request.seed = config.seed;

  auto run_backend = [&]() {
    std::vector<std::vector<Hypothesis>> groups;
    try {
      groups = backend.generate(request);
    } catch (const GenerationError&) {
      throw;
    } catch (const std::exception& e) {
      throw GenerationError(GenerationError::Kind::backend_failure,
                            backend.name() + ": " + e.what());
    }
    if (groups.size() != config.num_beam_groups) {
      throw GenerationError(GenerationError::Kind::backend_failure,
                            backend.name() + " returned " + std::to_string(groups.size()) +
                                " beam groups, expected " +
                                std::to_string(config.num_beam_groups));
    }
    for (auto& beams : groups) {
      for (auto& h : beams) h.text = tokenizer.truncate(h.text, config.max_length);
    }
    return groups;
  };

  auto all_distinct = [](const std::vector<std::vector<Hypothesis>>& groups) {
    std::set<std::string> seen;
    for (const auto& beams : groups) {
      if (beams.empty() || is_blank(beams.front().text)) return false;
      if (!seen.insert(beams.front().text).second) return false;
    }
    return true;
  };

  auto groups = run_backend();
  for (int attempt = 0; attempt < kMaxRegenerations && !all_distinct(groups); ++attempt) {
    request.diversity_penalty += kPenaltyIncrement;
    groups = run_backend();
  }

  CandidateSet set;
  set.document_id = record.id;
  set.config_fingerprint = config.fingerprint();
  std::set<std::string> used;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Hypothesis* pick = nullptr;
    for (const auto& h : groups[g]) {
      if (!is_blank(h.text) && !used.contains(h.text)) {
        pick = &h;
        break;
      }
    }
    if (pick == nullptr) {
      throw GenerationError(GenerationError::Kind::degenerate_output,
                            "document '" + record.id + "': no distinct candidate for group " +
                                std::to_string(g));
    }
    used.insert(pick->text);
    set.candidates.push_back({pick->text, request.group_languages[g], g, pick->score});
  }
  return set;
}

CandidateSet stub_generate(const DocumentRecord& record, const GenerationConfig& config) {
  static const StubGenerator kStub;
  return generate_candidates(record, config, kStub);
}

std::vector<CandidateSet> generate_all(std::span<const DocumentRecord> records,
                                       const GenerationConfig& config,
                                       const GeneratorBackend& backend, std::size_t workers) {
  std::vector<CandidateSet> sets(records.size());
  parallel_for(records.size(), backend.thread_safe() ? workers : 1, [&](std::size_t i) {
    sets[i] = generate_candidates(records[i], config, backend);
  });
  return sets;
}

}  // namespace conversum
