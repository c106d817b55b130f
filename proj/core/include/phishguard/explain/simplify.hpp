#pragma once

#include <array>
#include <string>
#include <vector>

#include "phishguard/agents/backend.hpp"
#include "phishguard/agents/types.hpp"

namespace phishguard::explain {

struct SimplifiedExplanation {
  std::string text;
  agents::ExplainMode mode = agents::ExplainMode::Plain;
  std::array<std::string, 3> sources;  /* role names of the three reports */
};

/* One consolidated plain-language rationale from the three detection
   reports. Expert mode asks for indicator lists and header analysis on top.
   Throws Precondition unless exactly three reports are given,
   EmptyExplanation when the backend returns a blank reply. */
SimplifiedExplanation simplify(agents::ChatBackend& backend,
                               const std::vector<agents::AgentReport>& reports,
                               agents::ExplainMode mode);

}  // namespace phishguard::explain
