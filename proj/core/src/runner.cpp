#include "phishguard/agents/runner.hpp"

#include <chrono>
#include <thread>

#include "phishguard/errors.hpp"
#include "phishguard/num/rng.hpp"

namespace phishguard::agents {

namespace {

void backoff_sleep(const ChatBackendConfig& config, int attempt, num::RngStream& rng) {
  auto base = config.initial_backoff.count();
  if (base <= 0) return;
  double factor = static_cast<double>(1LL << attempt);
  double jitter = rng.uniform(0.0, 0.5);
  auto delay = std::chrono::milliseconds(
      static_cast<std::int64_t>(static_cast<double>(base) * factor * (1.0 + jitter)));
  std::this_thread::sleep_for(delay);
}

}  // namespace

std::string complete_with_retry(ChatBackend& backend, const std::vector<ChatMessage>& messages,
                                std::uint64_t jitter_seed) {
  num::RngStream rng(jitter_seed);
  const int attempts_allowed = std::max(1, backend.config().max_retries);
  for (int attempt = 0;; ++attempt) {
    try {
      return backend.complete(messages);
    } catch (const Error& e) {
      if (e.code() != Errc::BackendUnavailable || attempt + 1 >= attempts_allowed) throw;
      backoff_sleep(backend.config(), attempt, rng);
    }
  }
}

AgentReport run_agent(ChatBackend& backend, AgentRole role, const email::ParsedEmail& email,
                      const PromptTemplate* custom, std::uint64_t jitter_seed) {
  require(role == AgentRole::Text || role == AgentRole::Url || role == AgentRole::Metadata,
          Errc::Precondition, "run_agent drives detection roles only");
  std::vector<ChatMessage> messages = build_prompt(role, email, custom);

  AgentReport report;
  report.role = role;
  num::RngStream rng(jitter_seed);
  const int attempts_allowed = std::max(1, backend.config().max_retries);
  auto start = std::chrono::steady_clock::now();
  for (int attempt = 0;; ++attempt) {
    report.attempts = attempt + 1;
    try {
      report.raw_response = backend.complete(messages);
      report.verdict = parse_verdict_json(report.raw_response);
      break;
    } catch (const Error& e) {
      bool retryable = e.code() == Errc::BackendUnavailable ||
                       e.code() == Errc::VerdictUnparseable;
      if (!retryable || attempt + 1 >= attempts_allowed) {
        if (e.code() == Errc::VerdictUnparseable && !report.raw_response.empty())
          raise(Errc::VerdictUnparseable,
                std::string(e.what()) + "; raw response: " + report.raw_response.substr(0, 200));
        throw;
      }
      backoff_sleep(backend.config(), attempt, rng);
    }
  }
  report.latency_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return report;
}

std::array<AgentReport, 3> run_detection_agents(ChatBackend& backend,
                                                const email::ParsedEmail& email,
                                                std::uint64_t jitter_seed) {
  return {
      run_agent(backend, AgentRole::Text, email, nullptr, jitter_seed),
      run_agent(backend, AgentRole::Url, email, nullptr, jitter_seed + 1),
      run_agent(backend, AgentRole::Metadata, email, nullptr, jitter_seed + 2),
  };
}

}  // namespace phishguard::agents
