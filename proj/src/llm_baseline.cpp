// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/llm_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "conversum/languages.hpp"
#include "conversum/parallel.hpp"
#include "conversum/text.hpp"

namespace conversum {
namespace {

// "Summary" in the registry languages, as models tend to label their output.
const std::vector<std::string>& default_labels() {
  static const std::vector<std::string> labels = {
      "Summary", "Summarization", "সারাংশ", "सारांश", "摘要", "总结",
      "總結", "要約", "요약", "ملخص", "خلاصه", "خلاصہ",
      "Resumen", "Résumé", "Resume", "Resumo", "Резюме", "Краткое содержание",
      "Підсумок", "Резиме", "Rezime", "สรุป", "சுருக்கம்", "సారాంశం",
      "સારાંશ", "ਸਾਰ", "အနှစ်ချုပ်", "ማጠቃለያ", "ጽማቕ", "Özet",
      "Ringkasan", "Muhtasari", "Tóm tắt", "Xulosa", "Xülasə", "Taƙaitawa",
      "Àkótán", "Crynodeb", "Nchịkọta", "Soo koobid", "لنډیز", "Incamake",
      "Кыскача", "සාරාංශය",
  };
  return labels;
}

std::string regex_escape(std::string_view text) {
  static constexpr std::string_view kSpecial = R"(\^$.|?*+()[]{}/)";
  std::string out;
  for (char c : text) {
    if (kSpecial.find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::regex label_pattern(std::span<const std::string> labels) {
  std::string alternatives;
  for (const auto& label : labels) {
    if (!alternatives.empty()) alternatives += '|';
    alternatives += regex_escape(label);
  }
  // Accepts the ASCII colon and the full-width one used in CJK output.
  return std::regex("^\\s*(?:" + alternatives + ")\\s*(?::|：)\\s*",
                    std::regex::ECMAScript | std::regex::icase);
}

std::string target_display(std::string_view tag) {
  if (!is_registered_language(tag)) {
    throw LlmError(LlmError::Kind::spec_invalid, "unknown target language '" + std::string(tag) + "'");
  }
  return display_name(tag);
}

std::string survey_prompt() {
  std::string names;
  for (const auto& language : language_registry()) {
    if (!names.empty()) names += ", ";
    names += language.display_name;
  }
  return "How confident are you to generate high-quality cross-lingual summary concisely and "
         "informatively for low-resource languages? Find the list of languages - " +
         names +
         ". Rate your confidence level for cross-lingual summarization on a scale of 1 to 10 for "
         "the given languages.";
}

std::chrono::milliseconds backoff_for(const RetryPolicy& policy, std::size_t attempt) {
  double ms = static_cast<double>(policy.initial_backoff.count()) *
              std::pow(policy.backoff_multiplier, static_cast<double>(attempt));
  ms = std::min(ms, static_cast<double>(policy.max_backoff.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

}  // namespace

LlmError::LlmError(Kind kind, std::string detail, int http_status)
    : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind), http_status_(http_status) {}

std::string_view to_string(LlmError::Kind kind) {
  switch (kind) {
    case LlmError::Kind::spec_invalid: return "SpecInvalid";
    case LlmError::Kind::auth: return "AuthError";
    case LlmError::Kind::rate_limited: return "RateLimited";
    case LlmError::Kind::transient: return "TransientError";
    case LlmError::Kind::context_overflow: return "ContextOverflow";
    case LlmError::Kind::invalid_response: return "InvalidResponse";
    case LlmError::Kind::provider: return "ProviderError";
  }
  return "LlmError";
}

std::string_view to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::zero_shot: return "zero_shot";
    case PromptMode::one_shot: return "one_shot";
    case PromptMode::confidence_survey: return "confidence_survey";
  }
  return "zero_shot";
}

std::optional<PromptMode> parse_prompt_mode(std::string_view name) {
  for (auto mode : {PromptMode::zero_shot, PromptMode::one_shot, PromptMode::confidence_survey}) {
    if (name == to_string(mode)) return mode;
  }
  if (name == "zero-shot") return PromptMode::zero_shot;
  if (name == "one-shot") return PromptMode::one_shot;
  return std::nullopt;
}

std::string build_prompt(const PromptSpec& spec) {
  using Kind = LlmError::Kind;
  if (spec.mode == PromptMode::confidence_survey) {
    if (spec.shot_example) throw LlmError(Kind::spec_invalid, "survey takes no example");
    return survey_prompt();
  }
  if (is_blank(spec.document)) throw LlmError(Kind::spec_invalid, "empty document");
  std::string language = target_display(spec.target_lang);
  std::string prompt;
  if (spec.mode == PromptMode::one_shot) {
    if (!spec.shot_example) throw LlmError(Kind::spec_invalid, "one_shot requires an example");
    prompt = "Example:\nDocument: " + spec.shot_example->document + "\nSummary (" + language +
             "): " + spec.shot_example->summary + "\n\n";
  } else if (spec.shot_example) {
    throw LlmError(Kind::spec_invalid, "zero_shot forbids an example");
  }
  prompt += "Summarize the given text in " + language +
            ", preferably in 80 words, concisely and informative. " + spec.document;
  return prompt;
}

nlohmann::json OpenAiConfig::to_json() const {
  return {{"base_url", base_url},       {"chat_path", chat_path},   {"model", model},
          {"api_key_env", api_key_env}, {"temperature", temperature},
          {"timeout_seconds", timeout_seconds}};
}

OpenAiConfig OpenAiConfig::from_json(const nlohmann::json& j) {
  OpenAiConfig c;
  c.base_url = j.value("base_url", c.base_url);
  c.chat_path = j.value("chat_path", c.chat_path);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.temperature = j.value("temperature", c.temperature);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  return c;
}

LlmError classify_http_error(int status, std::string_view body) {
  using Kind = LlmError::Kind;
  std::string detail = "HTTP " + std::to_string(status);
  std::string message(body);
  try {
    auto j = nlohmann::json::parse(body);
    if (j.contains("error") && j["error"].contains("message")) {
      message = j["error"]["message"].get<std::string>();
    }
  } catch (const std::exception&) {
  }
  if (!message.empty()) detail += ": " + message.substr(0, 500);

  if (status == 401 || status == 403) return LlmError(Kind::auth, detail, status);
  if (status == 429) return LlmError(Kind::rate_limited, detail, status);
  if (status == 408 || status >= 500) return LlmError(Kind::transient, detail, status);
  if (status == 400 || status == 413) {
    bool length = body.find("context_length") != std::string_view::npos ||
                  body.find("maximum context length") != std::string_view::npos ||
                  status == 413;
    if (length) return LlmError(Kind::context_overflow, detail, status);
  }
  return LlmError(Kind::provider, detail, status);
}

void RetryPolicy::validate() const {
  if (max_concurrent == 0) throw LlmError(LlmError::Kind::spec_invalid, "max_concurrent must be > 0");
  if (!(backoff_multiplier >= 1.0)) {
    throw LlmError(LlmError::Kind::spec_invalid, "backoff_multiplier must be >= 1");
  }
  if (initial_backoff.count() < 0 || max_backoff.count() < 0 || min_interval.count() < 0) {
    throw LlmError(LlmError::Kind::spec_invalid, "durations must be non-negative");
  }
}

nlohmann::json RetryPolicy::to_json() const {
  return {{"max_retries", max_retries},
          {"initial_backoff_ms", initial_backoff.count()},
          {"backoff_multiplier", backoff_multiplier},
          {"max_backoff_ms", max_backoff.count()},
          {"max_concurrent", max_concurrent},
          {"min_interval_ms", min_interval.count()}};
}

RetryPolicy RetryPolicy::from_json(const nlohmann::json& j) {
  RetryPolicy p;
  p.max_retries = j.value("max_retries", p.max_retries);
  p.initial_backoff = std::chrono::milliseconds(j.value("initial_backoff_ms", p.initial_backoff.count()));
  p.backoff_multiplier = j.value("backoff_multiplier", p.backoff_multiplier);
  p.max_backoff = std::chrono::milliseconds(j.value("max_backoff_ms", p.max_backoff.count()));
  p.max_concurrent = j.value("max_concurrent", p.max_concurrent);
  p.min_interval = std::chrono::milliseconds(j.value("min_interval_ms", p.min_interval.count()));
  return p;
}

LabelStripper::LabelStripper() : LabelStripper(default_labels()) {}

LabelStripper::LabelStripper(std::span<const std::string> labels) : pattern_(label_pattern(labels)) {}

std::string LabelStripper::strip(std::string_view raw) const {
  std::string text(trim(raw));
  return std::string(trim(std::regex_replace(text, pattern_, "", std::regex_constants::format_first_only)));
}

LlmRequester::LlmRequester(ChatClient& client, RetryPolicy policy, Clock clock,
                           LabelStripper stripper)
    : client_(client),
      policy_(std::move(policy)),
      clock_(std::move(clock)),
      stripper_(std::move(stripper)) {
  policy_.validate();
  if (!clock_.sleep) clock_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

void LlmRequester::pause(std::chrono::milliseconds duration) {
  if (duration.count() > 0) clock_.sleep(duration);
}

void LlmRequester::acquire() {
  std::unique_lock lock(mutex_);
  slot_free_.wait(lock, [&] { return in_flight_ < policy_.max_concurrent; });
  ++in_flight_;
  if (policy_.min_interval.count() > 0) {
    auto now = clock_.now();
    if (last_start_) {
      auto ready = *last_start_ + policy_.min_interval;
      if (ready > now) {
        // Holding the lock keeps starts strictly ordered and spaced.
        pause(std::chrono::duration_cast<std::chrono::milliseconds>(ready - now));
        now = std::max(clock_.now(), ready);
      }
    }
    last_start_ = now;
  }
}

void LlmRequester::release() {
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
  }
  slot_free_.notify_one();
}

LlmResponse LlmRequester::request_raw(const std::string& prompt) {
  std::vector<ChatMessage> messages = {{"user", prompt}};
  for (std::size_t attempt = 0;; ++attempt) {
    acquire();
    auto started = std::chrono::steady_clock::now();
    try {
      ChatReply reply = client_.complete(messages);
      auto elapsed = std::chrono::steady_clock::now() - started;
      release();
      LlmResponse response;
      response.raw_text = std::move(reply.content);
      response.model_id = std::move(reply.model_id);
      response.latency_ms = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count());
      response.prompt_tokens = reply.prompt_tokens;
      response.completion_tokens = reply.completion_tokens;
      response.retries = attempt;
      return response;
    } catch (const LlmError& e) {
      release();
      if (!e.retryable() || attempt >= policy_.max_retries) throw;
      auto delay = backoff_for(policy_, attempt);
      spdlog::warn("{} (attempt {}), retrying in {} ms", e.what(), attempt + 1, delay.count());
      pause(delay);
    } catch (...) {
      release();
      throw;
    }
  }
}

LlmResponse LlmRequester::request_summary(const std::string& prompt) {
  LlmResponse response = request_raw(prompt);
  response.extracted_summary = stripper_.strip(response.raw_text);
  if (response.extracted_summary.empty()) {
    throw LlmError(LlmError::Kind::invalid_response, "empty summary from " + client_.name());
  }
  return response;
}

LlmResponse request_summary(ChatClient& client, const std::string& prompt,
                            const RetryPolicy& policy) {
  LlmRequester requester(client, policy);
  return requester.request_summary(prompt);
}

std::string to_jsonl_line(const TranscriptEntry& entry) {
  nlohmann::json j = {{"document_id", entry.document_id},
                      {"prompt", entry.prompt},
                      {"raw_text", entry.raw_text},
                      {"model_id", entry.model_id},
                      {"latency_ms", entry.latency_ms}};
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void write_transcript(const std::filesystem::path& path, std::span<const TranscriptEntry> entries) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write transcript " + path.string());
  for (const auto& entry : entries) out << to_jsonl_line(entry) << '\n';
}

ComparisonResult run_comparison(std::span<const LanguagePair> pairs,
                                std::span<const DocumentRecord> records,
                                const ComparisonOptions& options, LlmRequester& requester,
                                const EvalBackends& backends) {
  if (pairs.empty()) {
    throw EvaluationError(EvaluationError::Kind::invalid_report, "no language pairs requested");
  }
  if (options.mode == PromptMode::confidence_survey) {
    throw LlmError(LlmError::Kind::spec_invalid, "comparison needs a summarization mode");
  }

  std::vector<DocumentRecord> samples;
  for (const auto& [source, target] : pairs) {
    auto view = language_pair_view(records, source, target);
    samples.insert(samples.end(), view.begin(), view.end());
  }

  struct Outcome {
    std::optional<SampleScore> score;
    std::optional<TranscriptEntry> transcript;
    std::optional<FailedSample> failure;
  };
  std::vector<Outcome> outcomes(samples.size());

  parallel_for(samples.size(), requester.policy().max_concurrent, [&](std::size_t i) {
    const DocumentRecord& record = samples[i];
    Outcome& outcome = outcomes[i];
    try {
      PromptSpec spec{options.mode, record.target_lang, std::nullopt, record.text};
      if (options.mode == PromptMode::one_shot) {
        auto it = options.shot_examples.find({record.source_lang, record.target_lang});
        if (it != options.shot_examples.end()) spec.shot_example = it->second;
      }
      std::string prompt = build_prompt(spec);
      LlmResponse response = requester.request_summary(prompt);
      outcome.transcript =
          TranscriptEntry{record.id, prompt, response.raw_text, response.model_id, response.latency_ms};
      SystemOutput output{record.id, response.extracted_summary};
      auto scores = score_outputs(std::span(&output, 1), std::span(&record, 1), backends);
      outcome.score = scores.front();
    } catch (const LlmError& e) {
      outcome.failure = FailedSample{record.id, record.source_lang, record.target_lang,
                                     std::string(to_string(e.kind())), e.what()};
    } catch (const Error& e) {
      outcome.failure =
          FailedSample{record.id, record.source_lang, record.target_lang, "Error", e.what()};
    }
  });

  ComparisonResult result;
  for (auto& outcome : outcomes) {
    if (outcome.transcript) result.transcript.push_back(std::move(*outcome.transcript));
    if (outcome.failure) {
      spdlog::warn("sample {} ({}-{}) failed: {}", outcome.failure->document_id,
                   outcome.failure->source_lang, outcome.failure->target_lang,
                   outcome.failure->message);
      ++result.failure_counts[{outcome.failure->source_lang, outcome.failure->target_lang}];
      result.failures.push_back(std::move(*outcome.failure));
    } else {
      result.samples.push_back(std::move(*outcome.score));
    }
  }
  if (!result.samples.empty()) {
    result.report.emplace(options.system_name, aggregate_scores(result.samples),
                          options.config_snapshot);
  }
  return result;
}

std::vector<LlmResponse> run_confidence_survey(LlmRequester& requester, std::size_t repeats) {
  std::string prompt = build_prompt({PromptMode::confidence_survey, "", std::nullopt, ""});
  std::vector<LlmResponse> responses;
  for (std::size_t i = 0; i < repeats; ++i) responses.push_back(requester.request_raw(prompt));
  return responses;
}

}  // namespace conversum
