#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phishguard/agents/types.hpp"
#include "phishguard/email/types.hpp"

namespace phishguard::agents {

struct PromptTemplate {
  AgentRole role = AgentRole::Text;
  std::string system_text;
  /* Placeholders: {body} {urls} {headers} {reports} {email}. Rendering with
     a placeholder left unfilled is a TemplateError. */
  std::string user_template;
};

const PromptTemplate& default_template(AgentRole role);

/* Detection roles. Text sees only body_text, Url only the URL list,
   Metadata only header-derived lines. */
std::vector<ChatMessage> build_prompt(AgentRole role, const email::ParsedEmail& email,
                                      const PromptTemplate* custom = nullptr);

std::vector<ChatMessage> build_simplifier_prompt(const std::vector<AgentReport>& reports,
                                                 ExplainMode mode,
                                                 const PromptTemplate* custom = nullptr);

std::vector<ChatMessage> build_adversarial_prompt(const email::ParsedEmail& email,
                                                  email::CorpusLabel intended_label,
                                                  const PromptTemplate* custom = nullptr);

/* Rendering helpers shared with the mock backend. */
std::string render_url_list(const email::ParsedEmail& email);
std::string render_metadata_block(const email::ParsedEmail& email);
std::string render_reports_block(const std::vector<AgentReport>& reports);
std::string render_email_block(const email::ParsedEmail& email);

/* Canonical JSON for an agent verdict; parse_verdict_json inverts it. */
std::string render_verdict(const AgentVerdict& verdict);

AgentVerdict parse_verdict_json(const std::string& response);

}  // namespace phishguard::agents
