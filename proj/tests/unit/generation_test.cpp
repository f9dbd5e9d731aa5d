// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/generation.hpp"

#include <set>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace conversum {
namespace {

using testing::TempDir;
using testing::write_file;

DocumentRecord make_record(std::string id, std::string text) {
  return {std::move(id), std::move(text), "A reference summary.", "english", "english", Split::test};
}

const char* kEightSentences = "S1 a. S2 b. S3 c. S4 d. S5 e. S6 f. S7 g. S8 h.";

TEST(GenerationConfig, Defaults) {
  GenerationConfig config;
  EXPECT_EQ(config.num_candidates, 8u);
  EXPECT_EQ(config.num_beam_groups, 8u);
  EXPECT_EQ(config.max_length, 80u);
  EXPECT_EQ(config.batch_size, 2u);
  EXPECT_NO_THROW(config.validate());
}

TEST(GenerationConfig, Validation) {
  GenerationConfig config;
  config.num_beam_groups = 4;
  EXPECT_THROW(config.validate(), GenerationError);
  config = {};
  config.max_length = 0;
  EXPECT_THROW(config.validate(), GenerationError);
  config = {};
  config.target_languages = {"klingon"};
  EXPECT_THROW(config.validate(), GenerationError);
}

TEST(GenerationConfig, JsonRoundTripAndFingerprint) {
  GenerationConfig config;
  config.target_languages = {"bengali", "english"};
  config.seed = 7;
  auto copy = GenerationConfig::from_json(config.to_json());
  EXPECT_EQ(copy.to_json(), config.to_json());
  EXPECT_EQ(copy.fingerprint(), config.fingerprint());
  copy.batch_size = 5;
  EXPECT_EQ(copy.fingerprint(), config.fingerprint());
  copy.max_length = 40;
  EXPECT_NE(copy.fingerprint(), config.fingerprint());
}

TEST(StubGenerator, StrideSelection) {
  GenerationConfig config;
  config.num_candidates = config.num_beam_groups = 4;
  auto set = stub_generate(make_record("d", kEightSentences), config);
  ASSERT_EQ(set.candidates.size(), 4u);
  EXPECT_EQ(set.candidates[0].text, "[english] S1 a. S2 b. S3 c. S4 d. S5 e. S6 f. S7 g. S8 h.");
  EXPECT_EQ(set.candidates[1].text, "[english] S1 a. S3 c. S5 e. S7 g.");
  EXPECT_EQ(set.candidates[2].text, "[english] S1 a. S4 d. S7 g.");
  EXPECT_EQ(set.candidates[3].text, "[english] S1 a. S5 e.");
  for (std::size_t g = 0; g < 4; ++g) EXPECT_EQ(set.candidates[g].group_index, g);
}

TEST(StubGenerator, LanguageTagsCycle) {
  GenerationConfig config;
  config.num_candidates = config.num_beam_groups = 4;
  config.target_languages = {"bn", "en"};
  auto set = stub_generate(make_record("d", kEightSentences), config);
  std::vector<std::string> languages;
  for (const auto& c : set.candidates) languages.push_back(c.language);
  EXPECT_EQ(languages, (std::vector<std::string>{"bengali", "english", "bengali", "english"}));
  EXPECT_EQ(set.candidates[0].text.rfind("[bengali] ", 0), 0u);
}

TEST(StubGenerator, MaxLengthBound) {
  GenerationConfig config;
  config.max_length = 5;
  WhitespaceTokenizer tok;
  auto set = stub_generate(make_record("d", kEightSentences), config);
  ASSERT_EQ(set.candidates.size(), 8u);
  std::set<std::string> distinct;
  for (const auto& c : set.candidates) {
    EXPECT_LE(tok.count(c.text), 5u);
    distinct.insert(c.text);
  }
  EXPECT_EQ(distinct.size(), 8u);
}

TEST(StubGenerator, SingleSentence) {
  GenerationConfig config;
  config.num_candidates = config.num_beam_groups = 1;
  auto set = stub_generate(make_record("d", "Only one sentence here."), config);
  ASSERT_EQ(set.candidates.size(), 1u);
  EXPECT_EQ(set.candidates[0].text, "[english] Only one sentence here.");

  config.num_candidates = config.num_beam_groups = 2;
  try {
    stub_generate(make_record("d", "Hello."), config);
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.kind(), GenerationError::Kind::degenerate_output);
  }
}

TEST(StubGenerator, DuplicatesReplacedByNextBestBeam) {
  // Every group of a two-sentence document keeps only the first sentence
  // once the stride exceeds one, so the sets collide and alternates are used.
  GenerationConfig config;
  auto set = stub_generate(make_record("d", "Alpha beta gamma delta epsilon zeta eta theta iota kappa. Lambda mu."), config);
  ASSERT_EQ(set.candidates.size(), 8u);
  std::set<std::string> distinct;
  for (const auto& c : set.candidates) distinct.insert(c.text);
  EXPECT_EQ(distinct.size(), 8u);
}

TEST(StubGenerator, Deterministic) {
  GenerationConfig config;
  config.seed = 42;
  auto record = make_record("d", kEightSentences);
  EXPECT_EQ(stub_generate(record, config), stub_generate(record, config));
  EXPECT_EQ(to_json(stub_generate(record, config)).dump(), to_json(stub_generate(record, config)).dump());
}

TEST(GenerateAll, ParallelMatchesSequential) {
  std::vector<DocumentRecord> records;
  for (int i = 0; i < 10; ++i) records.push_back(make_record("d" + std::to_string(i), kEightSentences));
  StubGenerator backend;
  GenerationConfig config;
  EXPECT_EQ(generate_all(records, config, backend, 1), generate_all(records, config, backend, 4));
}

class FailingBackend final : public GeneratorBackend {
 public:
  std::string name() const override { return "failing"; }
  std::vector<std::vector<Hypothesis>> generate(const BeamRequest&) const override {
    throw std::runtime_error("device lost");
  }
  const Tokenizer& tokenizer() const override { return tok_; }

 private:
  WhitespaceTokenizer tok_;
};

TEST(GenerateCandidates, BackendFailureIsWrapped) {
  try {
    generate_candidates(make_record("d", kEightSentences), GenerationConfig{}, FailingBackend{});
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.kind(), GenerationError::Kind::backend_failure);
  }
}

TEST(CandidateCache, RoundTripAndFingerprintMiss) {
  TempDir dir;
  CandidateCache cache(dir.path());
  GenerationConfig config;
  auto set = stub_generate(make_record("doc/with:odd id", kEightSentences), config);
  auto key = cache.store(set);
  EXPECT_TRUE(std::filesystem::exists(key));
  auto loaded = cache.load(set.document_id, set.config_fingerprint);
  ASSERT_TRUE(loaded.has_value());
  EXPECT_EQ(*loaded, set);
  EXPECT_FALSE(cache.load(set.document_id, "0000000000000000").has_value());
  EXPECT_FALSE(cache.load("other", set.config_fingerprint).has_value());
}

TEST(CandidateCache, TruncatedFileIsCorrupt) {
  TempDir dir;
  CandidateCache cache(dir.path());
  auto set = stub_generate(make_record("d", kEightSentences), GenerationConfig{});
  auto key = cache.store(set);
  auto body = testing::read_file(key);
  write_file(key, body.substr(0, body.size() / 2));
  try {
    cache.load(set.document_id, set.config_fingerprint);
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.kind(), GenerationError::Kind::corrupt_cache);
  }
}

}  // namespace
}  // namespace conversum
