#pragma once

#include <array>
#include <cstdint>

#include "phishguard/agents/backend.hpp"
#include "phishguard/agents/prompts.hpp"

namespace phishguard::agents {

/* Sends the role prompt and parses the JSON verdict. Transport failures and
   unparseable verdicts are both retried up to config().max_retries times with
   exponential backoff (initial_backoff doubling, jittered). After the last
   attempt the final error propagates with raw_response preserved in the
   exception text where available. */
AgentReport run_agent(ChatBackend& backend, AgentRole role, const email::ParsedEmail& email,
                      const PromptTemplate* custom = nullptr, std::uint64_t jitter_seed = 0);

/* Text, Url, Metadata in role order. */
std::array<AgentReport, 3> run_detection_agents(ChatBackend& backend,
                                                const email::ParsedEmail& email,
                                                std::uint64_t jitter_seed = 0);

/* Retry shell shared with the non-verdict roles (simplifier, adversarial). */
std::string complete_with_retry(ChatBackend& backend, const std::vector<ChatMessage>& messages,
                                std::uint64_t jitter_seed = 0);

}  // namespace phishguard::agents
