// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "conversum/corpus.hpp"
#include "conversum/error.hpp"
#include "conversum/evaluation.hpp"

namespace conversum {

class LlmError : public Error {
 public:
  enum class Kind {
    spec_invalid,
    auth,
    rate_limited,
    transient,
    context_overflow,
    invalid_response,
    provider,
  };

  LlmError(Kind kind, std::string detail, int http_status = 0);
  Kind kind() const { return kind_; }
  int http_status() const { return http_status_; }
  bool retryable() const { return kind_ == Kind::rate_limited || kind_ == Kind::transient; }

 private:
  Kind kind_;
  int http_status_;
};

std::string_view to_string(LlmError::Kind kind);

enum class PromptMode { zero_shot, one_shot, confidence_survey };

std::string_view to_string(PromptMode mode);
std::optional<PromptMode> parse_prompt_mode(std::string_view name);

struct ShotExample {
  std::string document;
  std::string summary;
};

struct PromptSpec {
  PromptMode mode = PromptMode::zero_shot;
  std::string target_lang;
  std::optional<ShotExample> shot_example;
  std::string document;
};

// Throws LlmError(spec_invalid).
std::string build_prompt(const PromptSpec& spec);

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatReply {
  std::string content;
  std::string model_id;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
};

// A chat-completion provider. Implementations report failures as LlmError
// so the retry policy can tell transient from fatal ones.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string name() const = 0;
  virtual ChatReply complete(const std::vector<ChatMessage>& messages) = 0;
};

struct OpenAiConfig {
  std::string base_url = "https://api.openai.com";
  std::string chat_path = "/v1/chat/completions";
  std::string model = "gpt-4o-2024-05-13";
  std::string api_key_env = "CONVERSUM_LLM_API_KEY";
  double temperature = 0.0;
  int timeout_seconds = 120;

  nlohmann::json to_json() const;
  static OpenAiConfig from_json(const nlohmann::json& j);
};

// Maps a non-2xx response to the error taxonomy: 401/403 auth, 429 rate
// limit, 408 and 5xx transient, length rejections context overflow.
LlmError classify_http_error(int status, std::string_view body);

// OpenAI-compatible /chat/completions over HTTPS. The API key is read from
// the configured environment variable at construction (LlmError(auth) when
// unset).
class OpenAiChatClient final : public ChatClient {
 public:
  explicit OpenAiChatClient(OpenAiConfig config);

  std::string name() const override { return "openai:" + config_.model; }
  ChatReply complete(const std::vector<ChatMessage>& messages) override;

 private:
  OpenAiConfig config_;
  std::string api_key_;
};

struct RetryPolicy {
  std::size_t max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30000};
  std::size_t max_concurrent = 2;
  // Minimum spacing between request starts.
  std::chrono::milliseconds min_interval{0};

  void validate() const;
  nlohmann::json to_json() const;
  static RetryPolicy from_json(const nlohmann::json& j);
};

struct Clock {
  std::function<std::chrono::steady_clock::time_point()> now = [] {
    return std::chrono::steady_clock::now();
  };
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
};

// Strips one leading "<label>:" from a response, for a configurable set of
// labels (default: "Summary" and its rendering in the supported languages).
class LabelStripper {
 public:
  LabelStripper();
  explicit LabelStripper(std::span<const std::string> labels);

  std::string strip(std::string_view raw) const;

 private:
  std::regex pattern_;
};

struct LlmResponse {
  std::string raw_text;
  std::string extracted_summary;
  std::string model_id;
  std::uint64_t latency_ms = 0;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
  std::size_t retries = 0;
};

// Issues requests under a RetryPolicy: at most max_concurrent in flight,
// starts spaced by min_interval, exponential backoff on retryable errors.
// Safe to share between threads.
class LlmRequester {
 public:
  LlmRequester(ChatClient& client, RetryPolicy policy, Clock clock = {},
               LabelStripper stripper = {});

  LlmResponse request_summary(const std::string& prompt);
  // Raw reply without label extraction.
  LlmResponse request_raw(const std::string& prompt);

  const RetryPolicy& policy() const { return policy_; }
  std::string client_name() const { return client_.name(); }

 private:
  void acquire();
  void release();
  void pause(std::chrono::milliseconds duration);

  ChatClient& client_;
  RetryPolicy policy_;
  Clock clock_;
  LabelStripper stripper_;
  std::mutex mutex_;
  std::condition_variable slot_free_;
  std::size_t in_flight_ = 0;
  std::optional<std::chrono::steady_clock::time_point> last_start_;
};

// One-shot convenience wrapper.
LlmResponse request_summary(ChatClient& client, const std::string& prompt,
                            const RetryPolicy& policy);

struct TranscriptEntry {
  std::string document_id;
  std::string prompt;
  std::string raw_text;
  std::string model_id;
  std::uint64_t latency_ms = 0;
};

std::string to_jsonl_line(const TranscriptEntry& entry);
void write_transcript(const std::filesystem::path& path, std::span<const TranscriptEntry> entries);

struct FailedSample {
  std::string document_id;
  std::string source_lang;
  std::string target_lang;
  std::string error_kind;
  std::string message;
};

struct ComparisonOptions {
  std::string system_name = "llm";
  PromptMode mode = PromptMode::zero_shot;
  // One-shot examples per language pair.
  std::map<LanguagePair, ShotExample> shot_examples;
  nlohmann::json config_snapshot = nlohmann::json::object();
};

struct ComparisonResult {
  // Empty when every sample failed.
  std::optional<EvalReport> report;
  std::vector<SampleScore> samples;  // successful samples, input order
  std::vector<FailedSample> failures;
  std::map<LanguagePair, std::size_t> failure_counts;
  std::vector<TranscriptEntry> transcript;  // input order
};

// For every record of every requested pair: prompt, request, evaluate.
// Per-sample failures are logged, counted and excluded. An empty pair list
// is rejected as an empty report.
ComparisonResult run_comparison(std::span<const LanguagePair> pairs,
                                std::span<const DocumentRecord> records,
                                const ComparisonOptions& options, LlmRequester& requester,
                                const EvalBackends& backends);

// Sends the confidence-survey prompt `repeats` times and returns every raw
// response without aggregation.
std::vector<LlmResponse> run_confidence_survey(LlmRequester& requester, std::size_t repeats);

}  // namespace conversum
