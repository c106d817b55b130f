#include "phishguard/explain/simplify.hpp"

#include "phishguard/agents/prompts.hpp"
#include "phishguard/agents/runner.hpp"
#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::explain {

SimplifiedExplanation simplify(agents::ChatBackend& backend,
                               const std::vector<agents::AgentReport>& reports,
                               agents::ExplainMode mode) {
  require(reports.size() == 3, Errc::Precondition,
          "simplify: expected exactly 3 agent reports, got " + std::to_string(reports.size()));

  auto messages = agents::build_simplifier_prompt(reports, mode);
  std::string reply = agents::complete_with_retry(backend, messages);
  std::string trimmed(text::trim(reply));
  require(!trimmed.empty(), Errc::EmptyExplanation, "simplifier returned an empty explanation");

  SimplifiedExplanation out;
  out.text = std::move(trimmed);
  out.mode = mode;
  for (std::size_t i = 0; i < 3; ++i) out.sources[i] = agents::to_string(reports[i].role);
  return out;
}

}  // namespace phishguard::explain
