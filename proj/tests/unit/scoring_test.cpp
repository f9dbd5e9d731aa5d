// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/scoring.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace conversum {
namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Frozen output of tests/oracles/stub_oracle.py.
const std::vector<double> kAbc = {
    -0.28312012125128738, 0.31335302712813029,  -0.16710593053804859, 0.11954149922272028,
    -0.026803272819464243, -0.31843668436771083, 0.3061401244462667,  0.27274898002642772,
    0.11380280547131695,  0.054885806576327287, -0.31167468169593338, 0.38688071352964137,
    -0.24242379409949855, -0.050037327733141117, 0.14983647680518372, -0.4033594824554394};

class ScoringTest : public ::testing::Test {
 protected:
  StubEncoder encoder_;
  StubLanguageIdentifier lang_id_;
  WhitespaceTokenizer tokenizer_;
  ScoringBackends backends() const { return {encoder_, lang_id_, tokenizer_}; }
};

TEST_F(ScoringTest, EncodeMatchesOracle) {
  auto v = encode("abc", encoder_);
  ASSERT_EQ(v.dim(), 16u);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(v[i], kAbc[i], 1e-12) << i;
}

TEST_F(ScoringTest, EncodeShortTextIsOneGram) {
  auto v = encode("ab", encoder_);
  EXPECT_NEAR(v[0], 0.14652918391064521, 1e-12);
  EXPECT_NEAR(v[1], -0.085003056109914765, 1e-12);
}

TEST_F(ScoringTest, EncodeIsNormalizedAndDeterministic) {
  for (const char* text : {"abc", "The quick brown fox.", "বাংলা লেখা", "x"}) {
    auto v = encode(text, encoder_);
    EXPECT_NEAR(v.norm(), 1.0, 1e-6) << text;
    EXPECT_EQ(v, encode(text, encoder_));
  }
}

TEST_F(ScoringTest, EncodeErrors) {
  try {
    encode("   ", encoder_);
    FAIL();
  } catch (const ScoringError& e) {
    EXPECT_EQ(e.kind(), ScoringError::Kind::empty_text);
  }
}

TEST(Cosine, Examples) {
  EmbeddingVector u({1.0, 0.0});
  EmbeddingVector v({kInvSqrt2, kInvSqrt2});
  EXPECT_NEAR(cosine_similarity(u, v), 0.70710678, 1e-8);
  EXPECT_DOUBLE_EQ(cosine_similarity(v, u), cosine_similarity(u, v));
  EXPECT_NEAR(cosine_similarity(u, u), 1.0, 1e-15);
  EXPECT_NEAR(cosine_similarity(u, EmbeddingVector({0.0, 3.0})), 0.0, 1e-15);
}

TEST(Cosine, Errors) {
  EmbeddingVector u({1.0, 0.0});
  try {
    cosine_similarity(u, EmbeddingVector({1.0, 0.0, 0.0}));
    FAIL();
  } catch (const ScoringError& e) {
    EXPECT_EQ(e.kind(), ScoringError::Kind::dimension_mismatch);
  }
  try {
    cosine_similarity(u, EmbeddingVector({0.0, 0.0}));
    FAIL();
  } catch (const ScoringError& e) {
    EXPECT_EQ(e.kind(), ScoringError::Kind::zero_vector);
  }
}

TEST(TriSimilarity, Examples) {
  EmbeddingVector a({0.3, -2.0, 5.0});
  EXPECT_NEAR(tri_similarity(a, a, a), 1.0, 1e-15);

  EmbeddingVector s({1.0, 0.0});
  EmbeddingVector c({0.0, 1.0});
  EXPECT_NEAR(tri_similarity(c, s, s), 0.5, 1e-15);

  EXPECT_NEAR(tri_similarity(EmbeddingVector({1.0, 0.0}), EmbeddingVector({0.0, 1.0}),
                             EmbeddingVector({kInvSqrt2, kInvSqrt2})),
              0.70710678, 1e-8);
}

TEST(TriSimilarity, ScaleInvariance) {
  EmbeddingVector c({0.2, 0.7, -0.1});
  EmbeddingVector r({-0.5, 0.4, 0.9});
  EmbeddingVector s({1.0, 2.0, 3.0});
  EmbeddingVector s3({3.0, 6.0, 9.0});
  EXPECT_NEAR(tri_similarity(c, r, s), tri_similarity(c, r, s3), 1e-15);
  EXPECT_NEAR(tri_similarity(c, r, s),
              tri_similarity(EmbeddingVector({0.4, 1.4, -0.2}), EmbeddingVector({-1.0, 0.8, 1.8}), s),
              1e-15);
}

TEST(TriSimilarity, ZeroVectorRejected) {
  EmbeddingVector z({0.0, 0.0});
  EmbeddingVector u({1.0, 0.0});
  EXPECT_THROW(tri_similarity(z, u, u), ScoringError);
  EXPECT_THROW(tri_similarity(u, u, z), ScoringError);
}

TEST(LengthPenalty, Formula) {
  EXPECT_NEAR(length_penalty(10, 20), 0.36787944, 1e-8);
  EXPECT_DOUBLE_EQ(length_penalty(20, 20), 1.0);
  EXPECT_DOUBLE_EQ(length_penalty(30, 20), 1.0);
  EXPECT_NEAR(length_penalty(5, 6), std::exp(1.0 - 6.0 / 5.0), 1e-15);
}

TEST(ComposeLase, ProductAndZero) {
  auto score = compose_lase(0.5, 0.8, 0.25);
  EXPECT_DOUBLE_EQ(score.value, 0.1);
  EXPECT_DOUBLE_EQ(compose_lase(0.9, 0.0, 1.0).value, 0.0);
}

TEST_F(ScoringTest, LaseSelfIdentity) {
  auto score = lase("[english] hello there world", "[english] hello there world", "english", backends());
  EXPECT_NEAR(score.meaning_similarity, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(score.length_penalty, 1.0);
  EXPECT_DOUBLE_EQ(score.language_confidence, 1.0);
  EXPECT_NEAR(score.value, 1.0, 1e-12);
}

TEST_F(ScoringTest, LaseWrongLanguageIsZero) {
  auto score = lase("[bengali] hello there world", "hello there world", "english", backends());
  EXPECT_DOUBLE_EQ(score.language_confidence, 0.0);
  EXPECT_DOUBLE_EQ(score.value, 0.0);
  EXPECT_GT(score.meaning_similarity, 0.0);
}

TEST_F(ScoringTest, LaseShortPrediction) {
  auto score = lase("one two", "one two three four", "english", backends());
  EXPECT_NEAR(score.length_penalty, std::exp(1.0 - 2.0), 1e-15);
}

TEST_F(ScoringTest, LaseEmptyRejected) {
  EXPECT_THROW(lase("", "ref", "english", backends()), ScoringError);
  EXPECT_THROW(lase("pred", " ", "english", backends()), ScoringError);
}

TEST(StubLanguageIdentifier, Tags) {
  StubLanguageIdentifier id;
  EXPECT_DOUBLE_EQ(id.confidence("[english] x", "english"), 1.0);
  EXPECT_DOUBLE_EQ(id.confidence("[english] x", "bengali"), 0.0);
  EXPECT_DOUBLE_EQ(id.confidence("plain text", "bengali"), 1.0);
  EXPECT_EQ(leading_language_tag("[thai] x"), "thai");
  EXPECT_FALSE(leading_language_tag("x [thai]").has_value());
}

TEST(DescendingOrder, Examples) {
  std::vector<double> v{0.2, 0.9, 0.5};
  EXPECT_EQ(descending_order(v), (std::vector<std::size_t>{1, 2, 0}));
  std::vector<double> ties{0.4, 0.4, 0.4};
  EXPECT_EQ(descending_order(ties), (std::vector<std::size_t>{0, 1, 2}));
}

class FixedLangId final : public LanguageIdentifier {
 public:
  explicit FixedLangId(std::vector<double> values) : values_(std::move(values)) {}
  std::string name() const override { return "fixed"; }
  double confidence(std::string_view text, std::string_view) const override {
    return values_.at(std::stoul(std::string(text.substr(1))));
  }

 private:
  std::vector<double> values_;
};

class ConstantEncoder final : public Encoder {
 public:
  std::string name() const override { return "constant"; }
  std::size_t dim() const override { return 2; }
  std::vector<double> embed(std::string_view) const override { return {3.0, 4.0}; }
};

TEST(RankCandidates, OrdersByLase) {
  ConstantEncoder encoder;
  FixedLangId lang_id({0.2, 0.9, 0.5});
  WhitespaceTokenizer tokenizer;
  ScoringBackends backends{encoder, lang_id, tokenizer};
  // ms = lp = 1, so LaSE equals the language confidence.
  CandidateSet set{"doc", {{"c0", "english", 0, {}}, {"c1", "english", 1, {}}, {"c2", "english", 2, {}}}, "fp"};
  auto ranked = rank_candidates(set, "the document", "cX", "english", backends);
  ASSERT_EQ(ranked.candidates.size(), 3u);
  std::vector<std::size_t> indices, ranks;
  for (const auto& c : ranked.candidates) {
    indices.push_back(c.original_index);
    ranks.push_back(c.rank);
    EXPECT_NEAR(c.tri_similarity,
                tri_similarity(c.embedding, ranked.reference_embedding, ranked.document_embedding), 1e-15);
  }
  EXPECT_EQ(indices, (std::vector<std::size_t>{1, 2, 0}));
  EXPECT_EQ(ranks, (std::vector<std::size_t>{1, 2, 3}));
}

TEST(RankCandidates, SingleCandidate) {
  StubEncoder encoder;
  StubLanguageIdentifier lang_id;
  WhitespaceTokenizer tokenizer;
  CandidateSet set{"doc", {{"[english] only one", "english", 0, {}}}, "fp"};
  auto ranked = rank_candidates(set, "doc text", "only one", "english", {encoder, lang_id, tokenizer});
  ASSERT_EQ(ranked.candidates.size(), 1u);
  EXPECT_EQ(ranked.candidates[0].rank, 1u);
}

}  // namespace
}  // namespace conversum
