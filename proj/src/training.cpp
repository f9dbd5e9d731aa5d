// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

namespace conversum {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

void write_json_file(const fs::path& path, const json& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TrainingError(TrainingError::Kind::checkpoint_io, "cannot write " + path.string());
  out << body.dump(2) << '\n';
  if (!out) throw TrainingError(TrainingError::Kind::checkpoint_io, "write failed: " + path.string());
}

// Fisher-Yates with raw engine output so the permutation does not depend on
// the standard library's distribution implementation.
void shuffle_indices(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

std::vector<double> average_ranks(std::span<const double> values) {
  auto order = std::vector<std::size_t>(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::string_view to_string(LrSchedule schedule) {
  switch (schedule) {
    case LrSchedule::constant: return "constant";
    case LrSchedule::linear_decay: return "linear_decay";
    case LrSchedule::warmup_linear: return "warmup_linear";
  }
  return "constant";
}

std::optional<LrSchedule> parse_lr_schedule(std::string_view name) {
  if (name == "constant") return LrSchedule::constant;
  if (name == "linear_decay") return LrSchedule::linear_decay;
  if (name == "warmup_linear") return LrSchedule::warmup_linear;
  return std::nullopt;
}

TrainingError::TrainingError(Kind kind, std::string detail)
    : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

std::string_view to_string(TrainingError::Kind kind) {
  switch (kind) {
    case TrainingError::Kind::invalid_config: return "InvalidTrainConfig";
    case TrainingError::Kind::non_finite_loss: return "NonFiniteLoss";
    case TrainingError::Kind::checkpoint_io: return "CheckpointIOError";
    case TrainingError::Kind::empty_training_set: return "EmptyTrainingSet";
    case TrainingError::Kind::empty_validation_set: return "EmptyValidationSet";
    case TrainingError::Kind::no_validations: return "NoValidations";
  }
  return "TrainingError";
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw TrainingError(TrainingError::Kind::invalid_config, what);
  };
  if (epochs < 1) fail("epochs must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (validate_every_steps < 1) fail("validate_every_steps must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be > 0");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) fail("warmup_fraction must be in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    fail("Adam betas must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  try {
    loss.validate();
  } catch (const ContrastiveError& e) {
    fail(e.what());
  }
}

json TrainConfig::to_json() const {
  return json{{"epochs", epochs},
              {"batch_size", batch_size},
              {"validate_every_steps", validate_every_steps},
              {"learning_rate", learning_rate},
              {"lr_schedule", to_string(lr_schedule)},
              {"warmup_fraction", warmup_fraction},
              {"seed", seed},
              {"max_steps", max_steps},
              {"loss", loss.to_json()},
              {"beta1", beta1},
              {"beta2", beta2},
              {"epsilon", epsilon}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig config;
  config.epochs = j.value("epochs", config.epochs);
  config.batch_size = j.value("batch_size", config.batch_size);
  config.validate_every_steps = j.value("validate_every_steps", config.validate_every_steps);
  config.learning_rate = j.value("learning_rate", config.learning_rate);
  if (j.contains("lr_schedule")) {
    auto name = j.at("lr_schedule").get<std::string>();
    auto schedule = parse_lr_schedule(name);
    if (!schedule) {
      throw TrainingError(TrainingError::Kind::invalid_config, "unknown lr_schedule '" + name + "'");
    }
    config.lr_schedule = *schedule;
  }
  config.warmup_fraction = j.value("warmup_fraction", config.warmup_fraction);
  config.seed = j.value("seed", config.seed);
  config.max_steps = j.value("max_steps", config.max_steps);
  if (j.contains("loss")) config.loss = LossConfig::from_json(j.at("loss"));
  config.beta1 = j.value("beta1", config.beta1);
  config.beta2 = j.value("beta2", config.beta2);
  config.epsilon = j.value("epsilon", config.epsilon);
  return config;
}

TrainingExample make_training_example(const RankedDocument& ranked) {
  TrainingExample example;
  example.document_id = ranked.document_id;
  example.document = ranked.document_embedding;
  example.reference = ranked.reference_embedding;
  for (const auto& c : ranked.candidates) {
    example.candidates.push_back(c.embedding);
    example.lase_values.push_back(c.lase.value);
  }
  return example;
}

LinearScorer::LinearScorer(std::size_t dim) : dim_(dim), weights_(dim * dim, 0.0) {
  for (std::size_t i = 0; i < dim_; ++i) weights_[i * dim_ + i] = 1.0;
}

std::vector<double> LinearScorer::project(const EmbeddingVector& x) const {
  if (x.dim() != dim_) {
    throw ScoringError(ScoringError::Kind::dimension_mismatch,
                       "scorer dim " + std::to_string(dim_) + " vs " + std::to_string(x.dim()));
  }
  std::vector<double> out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* row = &weights_[i * dim_];
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
  return out;
}

double LinearScorer::score(const EmbeddingVector& candidate, const EmbeddingVector& reference,
                           const EmbeddingVector& source) const {
  return tri_similarity(EmbeddingVector(project(candidate)), EmbeddingVector(project(reference)),
                        EmbeddingVector(project(source)));
}

double LinearScorer::accumulate_gradient(const EmbeddingVector& candidate,
                                         const EmbeddingVector& reference,
                                         const EmbeddingVector& source, double weight,
                                         std::span<double> gradient) const {
  auto u = project(candidate);
  auto v = project(reference);
  auto z = project(source);
  auto norm = [](const std::vector<double>& x) {
    return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
  };
  const double nu = norm(u), nv = norm(v), nz = norm(z);
  if (!(nu > 0.0 && nv > 0.0 && nz > 0.0)) {
    throw ScoringError(ScoringError::Kind::zero_vector, "projection collapsed to zero");
  }
  const double numerator = std::inner_product(u.begin(), u.end(), z.begin(), 0.0) +
                           std::inner_product(v.begin(), v.end(), z.begin(), 0.0);
  const double denominator = nz * (nu + nv);
  const double f = numerator / denominator;

  // d f / d{u,v,z} for f = N / D.
  for (std::size_t i = 0; i < dim_; ++i) {
    double gu = (z[i] - f * nz * u[i] / nu) / denominator;
    double gv = (z[i] - f * nz * v[i] / nv) / denominator;
    double gz = (u[i] + v[i] - f * (nu + nv) * z[i] / nz) / denominator;
    double* row = &gradient[i * dim_];
    for (std::size_t j = 0; j < dim_; ++j) {
      row[j] += weight * (gu * candidate[j] + gv * reference[j] + gz * source[j]);
    }
  }
  return f;
}

BatchObjective evaluate_batch(const Scorer& scorer, std::span<const TrainingExample* const> batch,
                              const LossConfig& loss) {
  BatchObjective objective;
  objective.gradient.assign(scorer.parameters().size(), 0.0);
  if (batch.empty()) return objective;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const TrainingExample* example : batch) {
    ContrastivePairBatch pairs;
    for (const auto& c : example->candidates) {
      pairs.scores.push_back(scorer.score(c, example->reference, example->document));
    }
    pairs.pairs = build_pairs(pairs.scores.size(), loss);
    objective.loss += inv * ranking_loss(pairs);
    auto dscores = loss_subgradient(pairs);
    for (std::size_t k = 0; k < dscores.size(); ++k) {
      if (dscores[k] == 0.0) continue;
      scorer.accumulate_gradient(example->candidates[k], example->reference, example->document,
                                 inv * dscores[k], objective.gradient);
    }
  }
  return objective;
}

AdamOptimizer::AdamOptimizer(std::size_t num_parameters, double beta1, double beta2,
                             double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(num_parameters), v_(num_parameters) {}

void AdamOptimizer::step(std::span<double> parameters, std::span<const double> gradient,
                         double learning_rate) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * gradient[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * gradient[i] * gradient[i];
    double m_hat = m_[i] / c1;
    double v_hat = v_[i] / c2;
    parameters[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon_);
  }
}

double learning_rate_at(const TrainConfig& config, std::size_t step, std::size_t total_steps) {
  const double lr = config.learning_rate;
  const double total = static_cast<double>(std::max<std::size_t>(total_steps, 1));
  const double s = static_cast<double>(step);
  switch (config.lr_schedule) {
    case LrSchedule::constant:
      return lr;
    case LrSchedule::linear_decay:
      return lr * std::max(0.0, (total - s + 1.0) / total);
    case LrSchedule::warmup_linear: {
      double warmup = std::max(1.0, std::round(config.warmup_fraction * total));
      if (s <= warmup) return lr * s / warmup;
      return lr * std::max(0.0, (total - s + 1.0) / std::max(1.0, total - warmup));
    }
  }
  return lr;
}

json TrainHistory::to_json() const {
  json steps_json = json::array();
  for (const auto& s : steps) steps_json.push_back({{"step", s.step}, {"loss", s.loss}});
  json validations_json = json::array();
  for (const auto& v : validations) {
    validations_json.push_back(
        {{"step", v.step}, {"mean_val_lase", v.mean_val_lase}, {"checkpoint", v.checkpoint}});
  }
  return json{{"steps", std::move(steps_json)},
              {"validations", std::move(validations_json)},
              {"best_checkpoint", best_checkpoint}};
}

TrainHistory TrainHistory::from_json(const json& j) {
  TrainHistory history;
  for (const auto& s : j.at("steps")) {
    history.steps.push_back({s.at("step").get<std::size_t>(), s.at("loss").get<double>()});
  }
  for (const auto& v : j.at("validations")) {
    history.validations.push_back({v.at("step").get<std::size_t>(),
                                   v.at("mean_val_lase").get<double>(),
                                   v.at("checkpoint").get<std::string>()});
  }
  history.best_checkpoint = j.value("best_checkpoint", std::string());
  return history;
}

double validate(const Scorer& scorer, std::span<const TrainingExample> val_set) {
  if (val_set.empty()) {
    throw TrainingError(TrainingError::Kind::empty_validation_set, "no validation documents");
  }
  double total = 0.0;
  for (const auto& example : val_set) {
    if (example.candidates.empty()) {
      throw TrainingError(TrainingError::Kind::empty_validation_set,
                          "document '" + example.document_id + "' has no candidates");
    }
    std::vector<double> scores;
    for (const auto& c : example.candidates) {
      scores.push_back(scorer.score(c, example.reference, example.document));
    }
    total += example.lase_values[descending_order(scores).front()];
  }
  return total / static_cast<double>(val_set.size());
}

std::string select_best_checkpoint(const TrainHistory& history) {
  if (history.validations.empty()) {
    throw TrainingError(TrainingError::Kind::no_validations, "history has no validations");
  }
  const ValidationRecord* best = &history.validations.front();
  for (const auto& v : history.validations) {
    if (v.mean_val_lase > best->mean_val_lase) best = &v;
  }
  return best->checkpoint;
}

std::string checkpoint_id(std::size_t step) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "step_%06zu", step);
  return buffer;
}

void save_parameters(const fs::path& path, const Scorer& scorer) {
  auto params = scorer.parameters();
  write_json_file(path, json{{"scorer", scorer.name()},
                             {"parameters", std::vector<double>(params.begin(), params.end())}});
}

void load_parameters(const fs::path& path, Scorer& scorer) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrainingError(TrainingError::Kind::checkpoint_io, "cannot open " + path.string());
  std::vector<double> params;
  try {
    json body = json::parse(in);
    if (body.value("scorer", std::string()) != scorer.name()) {
      throw TrainingError(TrainingError::Kind::checkpoint_io,
                          path.string() + " was written by a different scorer");
    }
    params = body.at("parameters").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw TrainingError(TrainingError::Kind::checkpoint_io, path.string() + ": " + e.what());
  }
  auto target = scorer.mutable_parameters();
  if (params.size() != target.size()) {
    throw TrainingError(TrainingError::Kind::checkpoint_io,
                        path.string() + ": parameter count mismatch");
  }
  std::copy(params.begin(), params.end(), target.begin());
}

TrainOutcome train(Scorer& scorer, std::span<const TrainingExample> train_set,
                   std::span<const TrainingExample> val_set, const TrainConfig& config,
                   const TrainOptions& options) {
  config.validate();
  if (train_set.empty()) {
    throw TrainingError(TrainingError::Kind::empty_training_set, "no training documents");
  }
  if (val_set.empty()) {
    throw TrainingError(TrainingError::Kind::empty_validation_set, "no validation documents");
  }
  const bool persist = !options.run_dir.empty();
  if (persist) write_json_file(options.run_dir / "config.json", config.to_json());

  const std::size_t n = train_set.size();
  const std::size_t steps_per_epoch = (n + config.batch_size - 1) / config.batch_size;
  std::size_t total_steps = config.epochs * steps_per_epoch;
  if (config.max_steps > 0) total_steps = std::min(total_steps, config.max_steps);

  TrainOutcome outcome;
  std::map<std::string, std::vector<double>> kept;
  AdamOptimizer optimizer(scorer.parameters().size(), config.beta1, config.beta2, config.epsilon);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto run_validation = [&](std::size_t step) {
    ValidationRecord record{step, validate(scorer, val_set), checkpoint_id(step)};
    if (persist) {
      save_parameters(options.run_dir / "checkpoints" / record.checkpoint / "params.json", scorer);
    }
    auto params = scorer.parameters();
    kept[record.checkpoint].assign(params.begin(), params.end());
    spdlog::info("step {}: validation mean LaSE {:.4f}", step, record.mean_val_lase);
    outcome.history.validations.push_back(std::move(record));
  };

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs && step < total_steps; ++epoch) {
    shuffle_indices(order, rng);
    for (std::size_t b = 0; b < steps_per_epoch && step < total_steps; ++b) {
      ++step;
      std::vector<const TrainingExample*> batch;
      for (std::size_t i = b * config.batch_size;
           i < std::min(n, (b + 1) * config.batch_size); ++i) {
        batch.push_back(&train_set[order[i]]);
      }
      BatchObjective objective = evaluate_batch(scorer, batch, config.loss);
      bool finite = std::isfinite(objective.loss);
      for (double g : objective.gradient) finite = finite && std::isfinite(g);
      if (!finite) {
        std::string ids;
        for (const auto* example : batch) ids += (ids.empty() ? "" : ",") + example->document_id;
        throw TrainingError(TrainingError::Kind::non_finite_loss,
                            "step " + std::to_string(step) + ", epoch " + std::to_string(epoch) +
                                " batch " + std::to_string(b) + " [" + ids + "]");
      }
      optimizer.step(scorer.mutable_parameters(), objective.gradient,
                     learning_rate_at(config, step, total_steps));
      StepRecord record{step, objective.loss};
      outcome.history.steps.push_back(record);
      if (options.on_step) options.on_step(record);
      if (step % config.validate_every_steps == 0) run_validation(step);
    }
  }
  if (outcome.history.validations.empty() || outcome.history.validations.back().step != step) {
    run_validation(step);
  }

  outcome.history.best_checkpoint = select_best_checkpoint(outcome.history);
  outcome.best_parameters = kept.at(outcome.history.best_checkpoint);
  if (persist) write_json_file(options.run_dir / "history.json", outcome.history.to_json());
  return outcome;
}

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return 0.0;
  auto ra = average_ranks(a);
  auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace conversum
