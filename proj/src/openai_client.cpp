// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>

#include <httplib.h>

#include "conversum/llm_baseline.hpp"

namespace conversum {

OpenAiChatClient::OpenAiChatClient(OpenAiConfig config) : config_(std::move(config)) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw LlmError(LlmError::Kind::auth, "environment variable " + config_.api_key_env + " is not set");
  }
  api_key_ = key;
}

ChatReply OpenAiChatClient::complete(const std::vector<ChatMessage>& messages) {
  nlohmann::json body = {{"model", config_.model}, {"temperature", config_.temperature}};
  body["messages"] = nlohmann::json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_bearer_token_auth(api_key_);

  auto result = client.Post(config_.chat_path, body.dump(), "application/json");
  if (!result) {
    throw LlmError(LlmError::Kind::transient,
                   "request to " + config_.base_url + " failed: " + httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw classify_http_error(result->status, result->body);
  }

  try {
    auto j = nlohmann::json::parse(result->body);
    ChatReply reply;
    reply.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
    reply.model_id = j.value("model", config_.model);
    if (j.contains("usage")) {
      reply.prompt_tokens = j["usage"].value("prompt_tokens", std::uint64_t{0});
      reply.completion_tokens = j["usage"].value("completion_tokens", std::uint64_t{0});
    }
    return reply;
  } catch (const nlohmann::json::exception& e) {
    throw LlmError(LlmError::Kind::invalid_response, e.what(), result->status);
  }
}

}  // namespace conversum
