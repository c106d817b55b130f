#pragma once

#include "phishguard/agents/backend.hpp"

namespace phishguard::agents {

/* OpenAI-compatible chat completions client: POST {base_url}/v1/chat/completions
   with {model, messages}, reads choices[0].message.content. */
class HttpBackend : public ChatBackend {
public:
  explicit HttpBackend(ChatBackendConfig config);

  std::string complete(const std::vector<ChatMessage>& messages) override;

  const ChatBackendConfig& config() const override { return config_; }

private:
  ChatBackendConfig config_;
  RateLimiter limiter_;
  std::string host_;
  std::string path_prefix_;
};

}  // namespace phishguard::agents
