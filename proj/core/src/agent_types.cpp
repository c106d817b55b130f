#include "phishguard/agents/types.hpp"

#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::agents {

const char* to_string(AgentRole role) {
  switch (role) {
    case AgentRole::Text: return "text";
    case AgentRole::Url: return "url";
    case AgentRole::Metadata: return "metadata";
    case AgentRole::Simplifier: return "simplifier";
    case AgentRole::Adversarial: return "adversarial";
  }
  return "text";
}

AgentRole agent_role_from_string(const std::string& s) {
  std::string v = text::to_lower(text::trim(s));
  if (v == "text") return AgentRole::Text;
  if (v == "url") return AgentRole::Url;
  if (v == "metadata") return AgentRole::Metadata;
  if (v == "simplifier") return AgentRole::Simplifier;
  if (v == "adversarial") return AgentRole::Adversarial;
  raise(Errc::UnknownRole, "no agent role named '" + s + "'");
}

const char* to_string(Verdict v) {
  return v == Verdict::Phishing ? "Phishing" : "Legitimate";
}

}  // namespace phishguard::agents
