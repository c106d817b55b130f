#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace phishguard::agents {

enum class AgentRole { Text, Url, Metadata, Simplifier, Adversarial };

const char* to_string(AgentRole role);
AgentRole agent_role_from_string(const std::string& s);

enum class Verdict { Phishing, Legitimate };

const char* to_string(Verdict v);

enum class ExplainMode { Plain, Expert };

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct AgentVerdict {
  Verdict verdict = Verdict::Legitimate;
  double confidence = 0.0;
  std::string reasons;
};

struct AgentReport {
  AgentRole role = AgentRole::Text;
  AgentVerdict verdict;
  std::string raw_response;
  int attempts = 1;
  double latency_ms = 0.0;
};

enum class BackendKind { Mock, Http };

struct ChatBackendConfig {
  BackendKind kind = BackendKind::Mock;
  std::string base_url = "http://localhost:8000";
  std::string model_name = "mock";
  std::string api_key;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  /* Minimum spacing between requests across all threads; zero disables. */
  std::chrono::milliseconds rate_limit_interval{0};
  std::chrono::milliseconds initial_backoff{500};
};

}  // namespace phishguard::agents
