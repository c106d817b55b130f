#pragma once

#include "phishguard/agents/backend.hpp"
#include "phishguard/email/features.hpp"

namespace phishguard::agents {

struct MockRules {
  email::Lexicon lexicon = email::Lexicon::builtin();
  std::vector<std::string> denylist = {"malicious.example", "phish.example", "evil.example"};
};

/* Deterministic rule table standing in for a chat model. Every response is a
   pure function of the rendered prompt, so seeded runs are byte-reproducible.
   Role detection keys off the default system prompts. */
class MockBackend : public ChatBackend {
public:
  explicit MockBackend(ChatBackendConfig config = {}, MockRules rules = {});

  std::string complete(const std::vector<ChatMessage>& messages) override;

  const ChatBackendConfig& config() const override { return config_; }

  const MockRules& rules() const { return rules_; }

private:
  ChatBackendConfig config_;
  MockRules rules_;
};

}  // namespace phishguard::agents
