#include "phishguard/agents/mock_backend.hpp"

#include <algorithm>

#include "phishguard/adversarial/transforms.hpp"
#include "phishguard/agents/prompts.hpp"
#include "phishguard/email/parser.hpp"
#include "phishguard/email/urls.hpp"
#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::agents {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string_view after_first_line(std::string_view s) {
  std::size_t nl = s.find('\n');
  return nl == std::string_view::npos ? s : s.substr(nl + 1);
}

AgentRole detect_role(const std::vector<ChatMessage>& messages) {
  for (const auto& message : messages) {
    if (message.role != "system") continue;
    const std::string& s = message.content;
    if (s.find("focus on email text content") != std::string::npos) return AgentRole::Text;
    if (s.find("focus on URLs within emails") != std::string::npos) return AgentRole::Url;
    if (s.find("focus on email metadata") != std::string::npos) return AgentRole::Metadata;
    if (s.rfind("You are an expert in cybersecurity", 0) == 0) return AgentRole::Simplifier;
    if (s.rfind("You are an expert adversarial email generator", 0) == 0)
      return AgentRole::Adversarial;
  }
  raise(Errc::UnknownRole, "mock backend cannot identify the agent role from the prompt");
}

const std::string* user_content(const std::vector<ChatMessage>& messages) {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it)
    if (it->role == "user") return &it->content;
  return nullptr;
}

bool host_denylisted(const std::string& host, const std::vector<std::string>& denylist) {
  for (const auto& entry : denylist) {
    if (host == entry) return true;
    if (host.size() > entry.size() + 1 && host.ends_with("." + entry)) return true;
  }
  return false;
}

AgentVerdict text_rule(std::string_view body, const MockRules& rules) {
  std::size_t hits = email::count_keyword_hits(body, rules.lexicon);
  double confidence = std::clamp(0.5 + 0.12 * static_cast<double>(hits), 0.0, 0.99);
  AgentVerdict verdict;
  verdict.verdict = confidence >= 0.5 ? Verdict::Phishing : Verdict::Legitimate;
  verdict.confidence = confidence;
  verdict.reasons = "The message body contains " + std::to_string(hits) +
                    " occurrences of pressure or credential wording commonly used in phishing.";
  return verdict;
}

AgentVerdict url_rule(std::string_view block, const MockRules& rules) {
  AgentVerdict verdict;
  std::vector<std::string> flagged;
  for (const auto& span : email::find_url_spans(block)) {
    std::string_view raw = block.substr(span.offset, span.length);
    email::UrlRecord rec = email::make_url_record(raw, raw);
    if (rec.homoglyph_suspect)
      flagged.push_back("the link host '" + rec.host + "' imitates another domain with lookalike characters");
    else if (host_denylisted(rec.host, rules.denylist))
      flagged.push_back("the link host '" + rec.host + "' is on the local denylist");
  }
  if (!flagged.empty()) {
    verdict.verdict = Verdict::Phishing;
    verdict.confidence = 0.95;
    verdict.reasons = text::join(flagged, "; ") + ".";
  } else {
    verdict.verdict = Verdict::Legitimate;
    verdict.confidence = 0.8;
    verdict.reasons = "No link in the email resolves to a denylisted or visually deceptive host.";
  }
  return verdict;
}

AgentVerdict metadata_rule(std::string_view block) {
  std::vector<email::HeaderField> headers;
  for (const std::string& line : text::split_lines(block)) {
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    headers.push_back({text::trim(line.substr(0, colon)), text::trim(line.substr(colon + 1))});
  }
  email::AuthResults auth = email::parse_auth_results(headers);
  int code_sum = email::auth_code(auth.spf) + email::auth_code(auth.dkim) +
                 email::auth_code(auth.dmarc);

  std::string from_host, reply_host;
  for (const auto& h : headers) {
    if (text::iequals(h.name, "From") && from_host.empty())
      from_host = email::parse_mailbox(h.value).host();
    if (text::iequals(h.name, "Reply-To") && reply_host.empty())
      reply_host = email::parse_mailbox(h.value).host();
  }
  bool reply_mismatch = !reply_host.empty() && !from_host.empty() && reply_host != from_host;

  AgentVerdict verdict;
  if (code_sum <= -1 || reply_mismatch) {
    verdict.verdict = Verdict::Phishing;
    verdict.confidence = 0.9;
    verdict.reasons = reply_mismatch
                          ? "The reply-to address points at '" + reply_host +
                                "' while the sender claims '" + from_host + "'."
                          : "Sender authentication failed (SPF/DKIM/DMARC score " +
                                std::to_string(code_sum) + ").";
  } else {
    verdict.verdict = Verdict::Legitimate;
    verdict.confidence = 0.75;
    verdict.reasons = "Header fields are internally consistent and authentication does not fail.";
  }
  return verdict;
}

std::string simplifier_rule(std::string_view block) {
  /* concatenate the per-agent reasons into one plain paragraph */
  std::vector<std::string> phrases;
  bool any_phishing = false;
  for (const std::string& line : text::split_lines(block)) {
    std::size_t reasons = line.find("Reasons: ");
    if (reasons == std::string::npos) continue;
    if (line.find("verdict: Phishing") != std::string::npos) any_phishing = true;
    std::string phrase = text::trim(line.substr(reasons + 9));
    if (!phrase.empty()) phrases.push_back(phrase);
  }
  std::string out = any_phishing
                        ? "This email shows signs of phishing. "
                        : "This email looks legitimate. ";
  out += text::join(phrases, " ");
  return out;
}

std::string adversarial_rule(std::string_view block, const MockRules& rules) {
  email::RawEmail raw;
  raw.source_id = "mock-adversarial";
  raw.bytes = std::string(block);
  std::uint64_t seed = fnv1a(block);
  std::string subject, body;
  try {
    email::ParsedEmail parsed = email::parse_eml(raw);
    subject = parsed.subject;
    body = parsed.body_text;
  } catch (const Error&) {
    body = std::string(block);
  }
  (void)rules;
  auto sub = adversarial::synonym_substitute(subject, adversarial::SynonymTable::builtin(), seed);
  auto rewritten = adversarial::synonym_substitute(body, adversarial::SynonymTable::builtin(), seed + 1);
  auto padded = adversarial::insert_neutral_sentence(rewritten.text, seed + 2);
  auto disguised = adversarial::homoglyph_replace(padded.text, 0.6, seed + 3);
  std::string out;
  if (!subject.empty()) out += "Subject: " + sub.text + "\n\n";
  out += disguised.text;
  return out;
}

}  // namespace

MockBackend::MockBackend(ChatBackendConfig config, MockRules rules)
    : config_(std::move(config)), rules_(std::move(rules)) {
  config_.kind = BackendKind::Mock;
}

std::string MockBackend::complete(const std::vector<ChatMessage>& messages) {
  require(!messages.empty(), Errc::Precondition, "mock backend needs at least one message");
  AgentRole role = detect_role(messages);
  const std::string* user = user_content(messages);
  require(user != nullptr, Errc::Precondition, "mock backend needs a user message");
  std::string_view payload = after_first_line(*user);
  switch (role) {
    case AgentRole::Text:
      return render_verdict(text_rule(payload, rules_));
    case AgentRole::Url:
      return render_verdict(url_rule(payload, rules_));
    case AgentRole::Metadata:
      return render_verdict(metadata_rule(payload));
    case AgentRole::Simplifier:
      return simplifier_rule(payload);
    case AgentRole::Adversarial:
      return adversarial_rule(payload, rules_);
  }
  raise(Errc::UnknownRole, "unhandled agent role in mock backend");
}

}  // namespace phishguard::agents
