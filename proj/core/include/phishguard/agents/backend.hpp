#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "phishguard/agents/types.hpp"

namespace phishguard::agents {

/* One completion request; retries live in run_agent, not here. Implementations
   must be safe to share across threads. */
class ChatBackend {
public:
  virtual ~ChatBackend() = default;

  /* Returns assistant message content. Throws BackendUnavailable on
     transport-level failure. */
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;

  virtual const ChatBackendConfig& config() const = 0;
};

/* Global minimum spacing between requests, shared by every thread using the
   same backend instance. */
class RateLimiter {
public:
  explicit RateLimiter(std::chrono::milliseconds interval) : interval_(interval) {}

  void acquire();

private:
  std::chrono::milliseconds interval_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_slot_{};
};

std::shared_ptr<ChatBackend> make_backend(const ChatBackendConfig& config);

}  // namespace phishguard::agents
