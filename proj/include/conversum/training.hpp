// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conversum/contrastive.hpp"
#include "conversum/error.hpp"
#include "conversum/scoring.hpp"

namespace conversum {

enum class LrSchedule { constant, linear_decay, warmup_linear };

std::string_view to_string(LrSchedule schedule);
std::optional<LrSchedule> parse_lr_schedule(std::string_view name);

struct TrainConfig {
  std::size_t epochs = 15;
  std::size_t batch_size = 4;
  std::size_t validate_every_steps = 1000;
  double learning_rate = 1e-3;
  LrSchedule lr_schedule = LrSchedule::warmup_linear;
  double warmup_fraction = 0.1;
  std::uint64_t seed = 0;
  // Optional cap on optimizer steps; 0 runs the full epochs x batches.
  std::size_t max_steps = 0;
  LossConfig loss;
  // Adam moment decay rates and denominator epsilon.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  // Throws TrainingError(invalid_config).
  void validate() const;

  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

class TrainingError : public Error {
 public:
  enum class Kind {
    invalid_config,
    non_finite_loss,
    checkpoint_io,
    empty_training_set,
    empty_validation_set,
    no_validations,
  };

  TrainingError(Kind kind, std::string detail);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(TrainingError::Kind kind);

// One document ready for training: embeddings plus the candidates in
// LaSE-rank order (best first) and their LaSE values.
struct TrainingExample {
  std::string document_id;
  EmbeddingVector document;
  EmbeddingVector reference;
  std::vector<EmbeddingVector> candidates;
  std::vector<double> lase_values;
};

TrainingExample make_training_example(const RankedDocument& ranked);

// A trainable evaluation function producing tri-similarity-compatible
// scores for (candidate, reference, source) embeddings.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::string name() const = 0;
  virtual double score(const EmbeddingVector& candidate, const EmbeddingVector& reference,
                       const EmbeddingVector& source) const = 0;
  // Adds weight * d(score)/d(parameters) into `gradient` and returns the score.
  virtual double accumulate_gradient(const EmbeddingVector& candidate,
                                     const EmbeddingVector& reference,
                                     const EmbeddingVector& source, double weight,
                                     std::span<double> gradient) const = 0;

  virtual std::span<const double> parameters() const = 0;
  virtual std::span<double> mutable_parameters() = 0;
};

// Tri-similarity over linearly projected embeddings,
//   score = f(Wc, Wr, Ws),
// with W a dim x dim matrix initialized to the identity so that the untrained
// scorer is exactly the encoder's tri-similarity.
class LinearScorer final : public Scorer {
 public:
  explicit LinearScorer(std::size_t dim);

  std::string name() const override { return "linear-tri-similarity"; }
  std::size_t dim() const { return dim_; }

  double score(const EmbeddingVector& candidate, const EmbeddingVector& reference,
               const EmbeddingVector& source) const override;
  double accumulate_gradient(const EmbeddingVector& candidate, const EmbeddingVector& reference,
                             const EmbeddingVector& source, double weight,
                             std::span<double> gradient) const override;

  std::span<const double> parameters() const override { return weights_; }
  std::span<double> mutable_parameters() override { return weights_; }

 private:
  std::vector<double> project(const EmbeddingVector& x) const;

  std::size_t dim_;
  std::vector<double> weights_;  // row-major
};

// Mean over documents of each document's pair-sum ranking loss, and its
// gradient with respect to the scorer parameters.
struct BatchObjective {
  double loss = 0.0;
  std::vector<double> gradient;
};

BatchObjective evaluate_batch(const Scorer& scorer, std::span<const TrainingExample* const> batch,
                              const LossConfig& loss);

// Bias-corrected first/second moment estimates.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t num_parameters, double beta1, double beta2, double epsilon);

  void step(std::span<double> parameters, std::span<const double> gradient,
            double learning_rate);

 private:
  double beta1_;
  double beta2_;
  double epsilon_;
  std::size_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

// Learning rate for 1-based `step` out of `total_steps`.
double learning_rate_at(const TrainConfig& config, std::size_t step, std::size_t total_steps);

struct StepRecord {
  std::size_t step = 0;
  double loss = 0.0;
};

struct ValidationRecord {
  std::size_t step = 0;
  double mean_val_lase = 0.0;
  std::string checkpoint;
};

struct TrainHistory {
  std::vector<StepRecord> steps;
  std::vector<ValidationRecord> validations;
  std::string best_checkpoint;

  nlohmann::json to_json() const;
  static TrainHistory from_json(const nlohmann::json& j);
};

struct TrainOptions {
  // When set, checkpoints, the config snapshot and the history are written
  // here. When empty, checkpoints are kept in memory only.
  std::filesystem::path run_dir;
  std::function<void(const StepRecord&)> on_step;
};

struct TrainOutcome {
  TrainHistory history;
  std::vector<double> best_parameters;
};

// Mean LaSE of the candidate each document's scorer ranks first (ties go to
// the better LaSE rank).
double validate(const Scorer& scorer, std::span<const TrainingExample> val_set);

// Identifier of the validation with maximal mean LaSE, earliest on ties.
std::string select_best_checkpoint(const TrainHistory& history);

std::string checkpoint_id(std::size_t step);

TrainOutcome train(Scorer& scorer, std::span<const TrainingExample> train_set,
                   std::span<const TrainingExample> val_set, const TrainConfig& config,
                   const TrainOptions& options = {});

void save_parameters(const std::filesystem::path& path, const Scorer& scorer);
void load_parameters(const std::filesystem::path& path, Scorer& scorer);

// Spearman rank correlation with average ranks for ties; 0 when either side
// is constant.
double spearman_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace conversum
