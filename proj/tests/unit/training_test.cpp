// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/training.hpp"

#include <random>

#include <gtest/gtest.h>

#include "conversum/synthetic.hpp"
#include "test_support.hpp"

namespace conversum {
namespace {

EmbeddingVector random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  for (auto& x : v) x = n(rng);
  return EmbeddingVector(std::move(v));
}

TrainingExample random_example(std::mt19937_64& rng, std::size_t dim, std::size_t n, std::string id) {
  TrainingExample e;
  e.document_id = std::move(id);
  e.document = random_vector(rng, dim);
  e.reference = random_vector(rng, dim);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    e.candidates.push_back(random_vector(rng, dim));
    e.lase_values.push_back(u(rng));
  }
  std::sort(e.lase_values.begin(), e.lase_values.end(), std::greater<>());
  return e;
}

std::vector<TrainingExample> toy_examples(std::uint64_t seed) {
  StubEncoder encoder;
  StubLanguageIdentifier lang_id;
  WhitespaceTokenizer tokenizer;
  ScoringBackends backends{encoder, lang_id, tokenizer};
  synthetic::ToyTaskConfig config;
  config.seed = seed;
  std::vector<TrainingExample> examples;
  for (const auto& doc : synthetic::make_toy_task(config)) {
    examples.push_back(make_training_example(rank_candidates(
        doc.candidates, doc.record.text, doc.record.summary, doc.record.target_lang, backends)));
  }
  return examples;
}

TEST(TrainConfig, DefaultsAndValidation) {
  TrainConfig config;
  EXPECT_EQ(config.epochs, 15u);
  EXPECT_EQ(config.batch_size, 4u);
  EXPECT_EQ(config.validate_every_steps, 1000u);
  EXPECT_NO_THROW(config.validate());

  config.epochs = 0;
  try {
    config.validate();
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.kind(), TrainingError::Kind::invalid_config);
  }
  config = {};
  config.batch_size = 0;
  EXPECT_THROW(config.validate(), TrainingError);
  config = {};
  config.validate_every_steps = 0;
  EXPECT_THROW(config.validate(), TrainingError);
  config = {};
  config.learning_rate = 0.0;
  EXPECT_THROW(config.validate(), TrainingError);
}

TEST(TrainConfig, JsonRoundTrip) {
  TrainConfig config;
  config.epochs = 3;
  config.lr_schedule = LrSchedule::linear_decay;
  config.loss.rank_scaled = false;
  config.max_steps = 17;
  EXPECT_EQ(TrainConfig::from_json(config.to_json()).to_json(), config.to_json());
  EXPECT_EQ(parse_lr_schedule("warmup_linear"), LrSchedule::warmup_linear);
  EXPECT_FALSE(parse_lr_schedule("cosine").has_value());
}

TEST(LearningRate, Schedules) {
  TrainConfig config;
  config.learning_rate = 1.0;
  config.lr_schedule = LrSchedule::constant;
  EXPECT_DOUBLE_EQ(learning_rate_at(config, 50, 100), 1.0);

  config.lr_schedule = LrSchedule::linear_decay;
  EXPECT_DOUBLE_EQ(learning_rate_at(config, 1, 100), 1.0);
  EXPECT_DOUBLE_EQ(learning_rate_at(config, 100, 100), 0.01);

  config.lr_schedule = LrSchedule::warmup_linear;
  config.warmup_fraction = 0.1;
  EXPECT_DOUBLE_EQ(learning_rate_at(config, 5, 100), 0.5);
  EXPECT_DOUBLE_EQ(learning_rate_at(config, 10, 100), 1.0);
  EXPECT_GT(learning_rate_at(config, 11, 100), learning_rate_at(config, 50, 100));
  EXPECT_GT(learning_rate_at(config, 100, 100), 0.0);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  AdamOptimizer adam(2, 0.9, 0.999, 1e-8);
  std::vector<double> params{1.0, -1.0};
  std::vector<double> grad{3.0, -0.5};
  adam.step(params, grad, 0.1);
  EXPECT_NEAR(params[0], 0.9, 1e-7);
  EXPECT_NEAR(params[1], -0.9, 1e-7);
}

TEST(SelectBestCheckpoint, Examples) {
  TrainHistory h;
  h.validations = {{1000, 0.3, "a"}, {2000, 0.5, "b"}, {3000, 0.5, "c"}};
  EXPECT_EQ(select_best_checkpoint(h), "b");
  h.validations = {{1000, 0.3, "only"}};
  EXPECT_EQ(select_best_checkpoint(h), "only");
  h.validations = {{1, 0.9, "first"}, {2, 0.8, "x"}, {3, 0.7, "y"}};
  EXPECT_EQ(select_best_checkpoint(h), "first");
  h.validations.clear();
  try {
    select_best_checkpoint(h);
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.kind(), TrainingError::Kind::no_validations);
  }
  EXPECT_EQ(checkpoint_id(25), "step_000025");
}

class ConstantScorer final : public Scorer {
 public:
  explicit ConstantScorer(bool reverse) : reverse_(reverse) {}
  std::string name() const override { return "oracle"; }
  // Candidates carry their LaSE value in the first coordinate.
  double score(const EmbeddingVector& c, const EmbeddingVector&, const EmbeddingVector&) const override {
    return reverse_ ? -c[0] : c[0];
  }
  double accumulate_gradient(const EmbeddingVector& c, const EmbeddingVector& r, const EmbeddingVector& s,
                             double, std::span<double>) const override {
    return score(c, r, s);
  }
  std::span<const double> parameters() const override { return {}; }
  std::span<double> mutable_parameters() override { return {}; }

 private:
  bool reverse_;
};

TEST(Validate, OracleAndAdversarialBounds) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TrainingExample> val;
  double max_mean = 0, min_mean = 0;
  for (int d = 0; d < 10; ++d) {
    TrainingExample e;
    e.document_id = "v" + std::to_string(d);
    e.document = e.reference = EmbeddingVector({1.0, 0.0});
    double hi = 0.0, lo = 1.0;
    for (int k = 0; k < 5; ++k) {
      double value = u(rng);
      e.candidates.push_back(EmbeddingVector({value, 1.0}));
      e.lase_values.push_back(value);
      hi = std::max(hi, value);
      lo = std::min(lo, value);
    }
    max_mean += hi / 10;
    min_mean += lo / 10;
    val.push_back(std::move(e));
  }
  EXPECT_NEAR(validate(ConstantScorer(false), val), max_mean, 1e-12);
  EXPECT_NEAR(validate(ConstantScorer(true), val), min_mean, 1e-12);
  LinearScorer random_scorer(2);
  double v = validate(random_scorer, val);
  EXPECT_GE(v, min_mean - 1e-12);
  EXPECT_LE(v, max_mean + 1e-12);
  EXPECT_THROW(validate(random_scorer, std::span<const TrainingExample>{}), TrainingError);
}

TEST(LinearScorer, IdentityIsTriSimilarity) {
  std::mt19937_64 rng(3);
  LinearScorer scorer(6);
  auto c = random_vector(rng, 6), r = random_vector(rng, 6), s = random_vector(rng, 6);
  EXPECT_NEAR(scorer.score(c, r, s), tri_similarity(c, r, s), 1e-14);
}

TEST(LinearScorer, BatchGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  const double eps = 1e-6;
  LossConfig loss;
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    LinearScorer scorer(4);
    std::normal_distribution<double> n(0.0, 0.3);
    for (auto& w : scorer.mutable_parameters()) w += n(rng);
    auto a = random_example(rng, 4, 5, "a");
    auto b = random_example(rng, 4, 5, "b");
    std::vector<const TrainingExample*> batch{&a, &b};

    bool near_kink = false;
    for (const auto* e : batch) {
      std::vector<double> scores;
      for (const auto& c : e->candidates) scores.push_back(scorer.score(c, e->reference, e->document));
      for (const auto& p : build_pairs(scores.size(), loss)) {
        if (std::abs(p.margin - scores[p.positive_index] + scores[p.negative_index]) <= 1e-3) near_kink = true;
      }
    }
    if (near_kink) continue;
    ++checked;

    auto objective = evaluate_batch(scorer, batch, loss);
    auto params = scorer.mutable_parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      double saved = params[i];
      params[i] = saved + eps;
      double up = evaluate_batch(scorer, batch, loss).loss;
      params[i] = saved - eps;
      double down = evaluate_batch(scorer, batch, loss).loss;
      params[i] = saved;
      EXPECT_NEAR(objective.gradient[i], (up - down) / (2 * eps), 1e-4) << "param " << i;
    }
  }
  EXPECT_GT(checked, 5);
}

TEST(Spearman, Examples) {
  std::vector<double> a{1, 2, 3, 4};
  std::vector<double> b{10, 20, 30, 40};
  std::vector<double> c{4, 3, 2, 1};
  EXPECT_NEAR(spearman_correlation(a, b), 1.0, 1e-12);
  EXPECT_NEAR(spearman_correlation(a, c), -1.0, 1e-12);
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{2, 1, 4, 3, 5};
  EXPECT_NEAR(spearman_correlation(x, y), 0.8, 1e-12);
}

TEST(Train, DeterministicUnderSeed) {
  auto examples = toy_examples(1);
  std::span<const TrainingExample> all(examples);
  TrainConfig config;
  config.learning_rate = 0.01;
  config.max_steps = 30;
  config.validate_every_steps = 10;
  LinearScorer a(16), b(16);
  auto ha = train(a, all.first(40), all.subspan(40, 10), config);
  auto hb = train(b, all.first(40), all.subspan(40, 10), config);
  ASSERT_EQ(ha.history.steps.size(), 30u);
  ASSERT_EQ(hb.history.steps.size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(ha.history.steps[i].loss, hb.history.steps[i].loss);
  EXPECT_EQ(ha.history.validations.size(), 3u);
  EXPECT_EQ(ha.best_parameters, hb.best_parameters);
}

TEST(Train, StepCountFollowsEpochsAndBatches) {
  auto examples = toy_examples(2);
  std::span<const TrainingExample> all(examples);
  TrainConfig config;
  config.epochs = 2;
  config.batch_size = 4;
  config.validate_every_steps = 4;
  LinearScorer scorer(16);
  auto outcome = train(scorer, all.first(10), all.subspan(10, 5), config);
  EXPECT_EQ(outcome.history.steps.size(), 6u);
  // Validations at 4 and at the final step.
  ASSERT_EQ(outcome.history.validations.size(), 2u);
  EXPECT_EQ(outcome.history.validations.back().step, 6u);
}

TEST(Train, CheckpointRoundTrip) {
  testing::TempDir dir;
  auto examples = toy_examples(3);
  std::span<const TrainingExample> all(examples);
  TrainConfig config;
  config.learning_rate = 0.01;
  config.max_steps = 20;
  config.validate_every_steps = 10;
  LinearScorer scorer(16);
  TrainOptions options;
  options.run_dir = dir.path();
  auto outcome = train(scorer, all.first(40), all.subspan(40, 10), config, options);
  EXPECT_TRUE(std::filesystem::exists(dir / "config.json"));
  for (const auto& v : outcome.history.validations) {
    LinearScorer loaded(16);
    load_parameters(dir.path() / "checkpoints" / v.checkpoint / "params.json", loaded);
    EXPECT_DOUBLE_EQ(validate(loaded, all.subspan(40, 10)), v.mean_val_lase);
  }
  LinearScorer wrong_dim(4);
  EXPECT_THROW(load_parameters(dir.path() / "checkpoints" / outcome.history.best_checkpoint / "params.json",
                               wrong_dim),
               TrainingError);
  auto history = TrainHistory::from_json(outcome.history.to_json());
  EXPECT_EQ(history.best_checkpoint, outcome.history.best_checkpoint);
  EXPECT_EQ(history.steps.size(), outcome.history.steps.size());
}

TEST(Train, LossDecreasesOnToyTask) {
  double early = 0.0, late = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto examples = toy_examples(seed);
    std::span<const TrainingExample> all(examples);
    TrainConfig config;
    config.seed = seed;
    config.learning_rate = 0.01;
    config.epochs = 1000;
    config.max_steps = 500;
    config.validate_every_steps = 100000;
    LinearScorer scorer(16);
    auto outcome = train(scorer, all.first(150), all.subspan(150), config);
    ASSERT_EQ(outcome.history.steps.size(), 500u);
    early += outcome.history.steps[9].loss / 5;
    late += outcome.history.steps[499].loss / 5;
  }
  EXPECT_LT(late, early);
}

TEST(Train, EmptySetsRejected) {
  LinearScorer scorer(16);
  std::vector<TrainingExample> none;
  auto examples = toy_examples(4);
  EXPECT_THROW(train(scorer, none, std::span<const TrainingExample>(examples).first(2), TrainConfig{}),
               TrainingError);
  EXPECT_THROW(train(scorer, std::span<const TrainingExample>(examples).first(2), none, TrainConfig{}),
               TrainingError);
}

}  // namespace
}  // namespace conversum
