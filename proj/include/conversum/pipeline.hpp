// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conversum/corpus.hpp"
#include "conversum/evaluation.hpp"
#include "conversum/generation.hpp"
#include "conversum/llm_baseline.hpp"
#include "conversum/scoring.hpp"
#include "conversum/training.hpp"

namespace conversum {

class PipelineError : public Error {
 public:
  enum class Kind { missing_upstream_artifact, invalid_config, unreadable_dataset };

  PipelineError(Kind kind, std::string detail, std::filesystem::path path = {});
  Kind kind() const { return kind_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  Kind kind_;
  std::filesystem::path path_;
};

std::string_view to_string(PipelineError::Kind kind);

struct DatasetConfig {
  // jsonl | xlsum | crosssum | cnndm
  std::string format = "jsonl";
  std::filesystem::path path;
  std::string name = "dataset";
  std::string language;     // xlsum
  std::string source_lang;  // crosssum
  std::string target_lang;  // crosssum
  std::vector<Split> splits = {Split::train, Split::validation, Split::test};
};

// Backend selectors. Only the deterministic stubs ship with this build.
struct BackendConfig {
  std::string encoder = "stub";
  std::size_t encoder_dim = 16;
  std::string generator = "stub";
  std::string lang_id = "stub";
  std::string token_encoder = "stub";
};

struct LlmConfig {
  // openai | stub
  std::string provider = "openai";
  OpenAiConfig openai;
  RetryPolicy retry;
  PromptMode mode = PromptMode::zero_shot;
  std::vector<LanguagePair> pairs;
  std::string system_name = "gpt-4o";
  Split split = Split::test;
  std::size_t survey_repeats = 0;
};

struct PipelineConfig {
  DatasetConfig dataset;
  GenerationConfig generation;
  LossConfig loss;
  TrainConfig train;
  BackendConfig backends;
  LlmConfig llm;
  std::filesystem::path output_dir = "runs/default";
  // Defaults to <output_dir>/cache.
  std::filesystem::path cache_dir;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool strict = false;

  // Pushes `seed` and `loss` into the nested configs, resolves cache_dir.
  void finalize();
  // Throws PipelineError(invalid_config), wrapping nested config errors.
  void validate() const;

  nlohmann::json to_json() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static PipelineConfig from_json(const nlohmann::json& j);
};

// Concrete backends selected by a BackendConfig.
class Backends {
 public:
  explicit Backends(const BackendConfig& config);

  const Encoder& encoder() const { return *encoder_; }
  const LanguageIdentifier& lang_id() const { return *lang_id_; }
  const GeneratorBackend& generator() const { return *generator_; }
  const Tokenizer& tokenizer() const { return generator_->tokenizer(); }
  const TokenEncoder& token_encoder() const { return *token_encoder_; }

  ScoringBackends scoring() const { return {*encoder_, *lang_id_, tokenizer()}; }
  EvalBackends evaluation() const { return {scoring(), *token_encoder_}; }

 private:
  std::unique_ptr<Encoder> encoder_;
  std::unique_ptr<LanguageIdentifier> lang_id_;
  std::unique_ptr<GeneratorBackend> generator_;
  std::unique_ptr<TokenEncoder> token_encoder_;
};

std::unique_ptr<DatasetSource> open_dataset(const DatasetConfig& config);

// Loads one split; a missing or unreadable file raises
// PipelineError(unreadable_dataset) naming the path.
std::vector<DocumentRecord> load_split(const PipelineConfig& config, Split split);

std::string version_string();

void write_manifest(const std::filesystem::path& dir, std::string_view command,
                    const PipelineConfig& config, double wall_seconds,
                    const nlohmann::json& extra = nlohmann::json::object());

struct GenerateResult {
  std::size_t generated = 0;
  std::size_t cache_hits = 0;
};

struct ScoreResult {
  std::size_t documents = 0;
  std::size_t candidates = 0;
};

struct EvaluateOptions {
  // Scorer parameters; defaults to the best checkpoint of the train step.
  std::filesystem::path checkpoint;
  // Evaluate the generator's top beam only.
  bool baseline_only = false;
};

struct EvaluateResult {
  EvalReport baseline;
  std::optional<EvalReport> system;
};

struct CompareLlmResult {
  ComparisonResult comparison;
  std::vector<LlmResponse> survey;
};

std::filesystem::path score_dump_path(const PipelineConfig& config, Split split);
std::filesystem::path train_dir(const PipelineConfig& config);

GenerateResult cmd_generate(const PipelineConfig& config);
ScoreResult cmd_score(const PipelineConfig& config);
TrainHistory cmd_train(const PipelineConfig& config);
EvaluateResult cmd_evaluate(const PipelineConfig& config, const EvaluateOptions& options = {});
// `client` overrides the configured provider (used by tests).
CompareLlmResult cmd_compare_llm(const PipelineConfig& config, ChatClient* client = nullptr);

// Deterministic offline provider: answers "Summary: " followed by the first
// `words` words of the document part of a summarization prompt.
class StubChatClient final : public ChatClient {
 public:
  explicit StubChatClient(std::size_t words = 40) : words_(words) {}

  std::string name() const override { return "stub-chat"; }
  ChatReply complete(const std::vector<ChatMessage>& messages) override;

 private:
  std::size_t words_;
};

}  // namespace conversum
