#include "phishguard/agents/prompts.hpp"

#include <cstdio>

#include <json.hpp>

#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::agents {

namespace {

constexpr const char* kJsonFormatTail =
    "Output your result in JSON format as: {'verdict': 'Phishing' or 'Legitimate', "
    "'confidence': 0-1, 'reasons': '...'}";

const PromptTemplate kTextTemplate{
    AgentRole::Text,
    std::string(
        "You are a cybersecurity expert specializing in phishing, with a particular focus on "
        "email text content. Your task is to examine the email body exclusively for phishing "
        "cues—such as abnormal language patterns, suspicious vocabulary, or any textual "
        "indicators of malicious intent. Do not analyze URLs or metadata, only focus on the "
        "email text. Provide your judgment on whether the email is 'Phishing' or 'Legitimate', "
        "along with a confidence score between 0 and 1 and a clear, concise explanation of "
        "your reasoning. ") + kJsonFormatTail,
    "Email text:\n{body}",
};

const PromptTemplate kUrlTemplate{
    AgentRole::Url,
    std::string(
        "You are a cybersecurity expert specializing in phishing, with a particular focus on "
        "URLs within emails. Your task is to carefully examine every URL in the email and "
        "determine whether it exhibits suspicious characteristics or signs of obfuscation, "
        "such as resembling forged bank sites, using unknown domains, or appearing unusually "
        "shortened. Do not analyze the email text or metadata, only focus on the URLs. Provide "
        "your judgment on whether the email is 'Phishing' or 'Legitimate', along with a "
        "confidence score between 0 and 1 and a clear, concise explanation of your reasoning. ") +
        kJsonFormatTail,
    "URLs found in the email:\n{urls}",
};

const PromptTemplate kMetadataTemplate{
    AgentRole::Metadata,
    std::string(
        "You are a cybersecurity expert specializing in phishing, with a particular focus on "
        "email metadata. Your task is to scrutinize the provided email header—including "
        "the subject, sender address, reply-to, return-path, and received fields—for any "
        "signs of forgery, anomalies, or suspicious indicators. Do not analyze email text or "
        "URLs, only focus on the metadata. Provide your judgment on whether the email is "
        "'Phishing' or 'Legitimate', along with a confidence score between 0 and 1 and a "
        "clear, concise explanation of your reasoning. ") + kJsonFormatTail,
    "Email header:\n{headers}",
};

const PromptTemplate kSimplifierTemplate{
    AgentRole::Simplifier,
    "You are an expert in cybersecurity with deep expertise in phishing. Your task is to take "
    "the detailed technical explanations provided by the three specialized agents (text, URL, "
    "and metadata) for why an email is classified as phishing or legitimate, and synthesize "
    "them into one coherent, reliable, and complete explanation written in plain, everyday "
    "language. Ensure that your explanation is truthful, meaningful, and based solely on "
    "factual evidence—do not include any fabricated details. Avoid technical jargon, "
    "simplify complex concepts, and provide clear, concise reasons for the classification "
    "that accurately reflect the underlying data.",
    "Agent reports:\n{reports}",
};

constexpr const char* kExpertModeAddendum =
    " Expert mode: additionally include indicators of compromise, a short email header "
    "analysis, and references to relevant threat intelligence frameworks; technical depth is "
    "expected in this mode.";

constexpr const char* kAdversarialIntro =
    "You are an expert adversarial email generator. Your objective is to produce a variant of "
    "the provided email that maintains the original meaning and structure while incorporating "
    "subtle modifications designed to bypass the phishing detectors. Depending on the type of "
    "email provided, follow the corresponding instructions:\n\n";

constexpr const char* kAdversarialPhishingBranch =
    "For phishing emails:\n"
    "1. Synonym Substitution: Replace keywords with synonyms (e.g., \"verify\" → "
    "\"confirm\", \"account\" → \"profile\", \"free\" → \"no money is needed\") so "
    "that the literal expression changes while the meaning remains intact.\n"
    "2. Sentence Rewriting: Alter the sentence structure without changing the underlying "
    "message (e.g., transform \"Update your account immediately\" into \"Please refresh your "
    "account details at your earliest convenience\"). Add decoy sentences about customer "
    "support/legitimate services. Remove overt threat indicators while maintaining urgency.\n"
    "3. Content Modification: Add or remove words and phrases as needed; for example, insert "
    "a neutral sentence like \"We hope this email serves you well\" or omit less critical "
    "content, to change the text's composition.\n"
    "4. Homoglyph Replacement: Substitute characters with similar-looking counterparts (e.g., "
    "replace the letter \"a\" in \"paypal.com\" with a Cyrillic \"a\" to disguise URLs while "
    "retaining their recognizable form.\n"
    "5. Polymorphic Variation: Modifying aspects such as the subject line, sender "
    "information, or overall format, thereby simulating a diverse range of phishing attack "
    "styles.\n\n";

constexpr const char* kAdversarialLegitimateBranch =
    "For legitimate emails:\n"
    "1. Subtle Suspicious Modifications: Modify the email in ways that make it appear more "
    "ambiguous or borderline suspicious (e.g., incorporate slightly urgent language or modify "
    "the subject line) without compromising its inherently benign intent.\n"
    "2. Synonym Substitution and Sentence Rewriting: Use similar techniques as above but "
    "ensure that the overall message remains authentic and professional, even if the "
    "modifications introduce elements that could potentially confuse detection systems.\n"
    "3. Content Enhancement: Optionally insert additional phrases that mimic some "
    "characteristics of phishing emails (e.g., ambiguous urgency or formatting cues), while "
    "still maintaining the legitimacy of the email.\n"
    "4. Polymorphic Variation: Adjust non-critical elements like the layout or minor "
    "stylistic details to introduce natural variability without altering the email's genuine "
    "nature.\n\n";

constexpr const char* kAdversarialOutputRequirements =
    "Output Requirements:\n"
    "- For phishing emails, the final variant should retain the malicious intent and target "
    "brand while evading detection.\n"
    "- For legitimate emails, the final variant should remain clearly benign and "
    "professional, yet include subtle modifications that challenge the detector.\n"
    "- Provide only the final modified email text and do not disclose the modification "
    "details.";

const char* primary_placeholder(AgentRole role) {
  switch (role) {
    case AgentRole::Text: return "{body}";
    case AgentRole::Url: return "{urls}";
    case AgentRole::Metadata: return "{headers}";
    case AgentRole::Simplifier: return "{reports}";
    case AgentRole::Adversarial: return "{email}";
  }
  return "{body}";
}

std::string render_user(const PromptTemplate& tmpl,
                        const std::vector<std::pair<std::string, std::string>>& values) {
  const char* needed = primary_placeholder(tmpl.role);
  require(tmpl.user_template.find(needed) != std::string::npos, Errc::TemplateError,
          std::string("template for role ") + to_string(tmpl.role) + " must reference " + needed);
  std::string out = tmpl.user_template;
  for (const auto& [key, value] : values) out = text::replace_all(out, key, value);
  for (const char* ph : {"{body}", "{urls}", "{headers}", "{reports}", "{email}"}) {
    bool provided = false;
    for (const auto& [key, value] : values) provided = provided || key == ph;
    if (!provided && out.find(ph) != std::string::npos)
      raise(Errc::TemplateError,
            std::string("placeholder ") + ph + " has no value for role " + to_string(tmpl.role));
  }
  return out;
}

}  // namespace

const PromptTemplate& default_template(AgentRole role) {
  switch (role) {
    case AgentRole::Text: return kTextTemplate;
    case AgentRole::Url: return kUrlTemplate;
    case AgentRole::Metadata: return kMetadataTemplate;
    case AgentRole::Simplifier: return kSimplifierTemplate;
    case AgentRole::Adversarial: {
      static const PromptTemplate adversarial{
          AgentRole::Adversarial,
          std::string(kAdversarialIntro) + kAdversarialPhishingBranch +
              kAdversarialLegitimateBranch + kAdversarialOutputRequirements,
          "Email:\n{email}",
      };
      return adversarial;
    }
  }
  return kTextTemplate;
}

std::string render_url_list(const email::ParsedEmail& email) {
  if (email.urls.empty()) return "(no URLs found)";
  std::vector<std::string> lines;
  lines.reserve(email.urls.size());
  for (const auto& url : email.urls) lines.push_back("- " + url.raw);
  return text::join(lines, "\n");
}

std::string render_metadata_block(const email::ParsedEmail& email) {
  std::vector<std::string> lines;
  auto add = [&](const char* name) {
    for (const auto& value : email.header_all(name)) lines.push_back(std::string(name) + ": " + value);
  };
  add("Subject");
  add("From");
  add("To");
  add("Reply-To");
  add("Return-Path");
  add("Date");
  add("Received");
  add("Authentication-Results");
  if (lines.empty()) return "(no header fields present)";
  return text::join(lines, "\n");
}

std::string render_reports_block(const std::vector<AgentReport>& reports) {
  std::vector<std::string> lines;
  for (const auto& report : reports) {
    std::string role = report.role == AgentRole::Url ? "URL"
                       : report.role == AgentRole::Metadata ? "Metadata"
                                                            : "Text";
    char conf[32];
    std::snprintf(conf, sizeof(conf), "%.2f", report.verdict.confidence);
    lines.push_back(role + " agent verdict: " + to_string(report.verdict.verdict) +
                    " (confidence " + conf + "). Reasons: " + report.verdict.reasons);
  }
  return text::join(lines, "\n");
}

std::string render_email_block(const email::ParsedEmail& email) {
  std::string out;
  auto add = [&](const char* name) {
    if (auto value = email.header(name)) out += std::string(name) + ": " + *value + "\n";
  };
  add("From");
  add("To");
  add("Subject");
  add("Reply-To");
  add("Date");
  out += "\n";
  out += email.body_text;
  return out;
}

std::vector<ChatMessage> build_prompt(AgentRole role, const email::ParsedEmail& email,
                                      const PromptTemplate* custom) {
  require(role == AgentRole::Text || role == AgentRole::Url || role == AgentRole::Metadata,
          Errc::Precondition, "detection prompt requested for a non-detection role");
  const PromptTemplate& tmpl = custom ? *custom : default_template(role);
  require(tmpl.role == role, Errc::TemplateError, "template role does not match requested role");
  std::vector<std::pair<std::string, std::string>> values;
  switch (role) {
    case AgentRole::Text:
      values.emplace_back("{body}", email.body_text);
      break;
    case AgentRole::Url:
      values.emplace_back("{urls}", render_url_list(email));
      break;
    default:
      values.emplace_back("{headers}", render_metadata_block(email));
      break;
  }
  return {{"system", tmpl.system_text}, {"user", render_user(tmpl, values)}};
}

std::vector<ChatMessage> build_simplifier_prompt(const std::vector<AgentReport>& reports,
                                                 ExplainMode mode, const PromptTemplate* custom) {
  require(reports.size() >= 3, Errc::MissingInput,
          "simplifier needs the three detection agent reports");
  const PromptTemplate& tmpl = custom ? *custom : default_template(AgentRole::Simplifier);
  std::string system_text = tmpl.system_text;
  if (mode == ExplainMode::Expert) system_text += kExpertModeAddendum;
  std::vector<std::pair<std::string, std::string>> values{
      {"{reports}", render_reports_block(reports)}};
  return {{"system", system_text}, {"user", render_user(tmpl, values)}};
}

std::vector<ChatMessage> build_adversarial_prompt(const email::ParsedEmail& email,
                                                  email::CorpusLabel intended_label,
                                                  const PromptTemplate* custom) {
  require(intended_label != email::CorpusLabel::Unlabeled, Errc::Precondition,
          "adversarial prompt needs a phishing or legitimate label");
  std::string system_text;
  if (custom) {
    system_text = custom->system_text;
  } else {
    const char* branch = intended_label == email::CorpusLabel::Phishing
                             ? kAdversarialPhishingBranch
                             : kAdversarialLegitimateBranch;
    system_text = std::string(kAdversarialIntro) + branch + kAdversarialOutputRequirements;
  }
  PromptTemplate tmpl = custom ? *custom : default_template(AgentRole::Adversarial);
  tmpl.system_text = system_text;
  std::vector<std::pair<std::string, std::string>> values{
      {"{email}", render_email_block(email)}};
  return {{"system", tmpl.system_text}, {"user", render_user(tmpl, values)}};
}

std::string render_verdict(const AgentVerdict& verdict) {
  nlohmann::json j{
      {"verdict", to_string(verdict.verdict)},
      {"confidence", verdict.confidence},
      {"reasons", verdict.reasons},
  };
  return j.dump();
}

namespace {

std::optional<std::string> first_json_object(const std::string& s) {
  for (std::size_t start = s.find('{'); start != std::string::npos;
       start = s.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < s.size(); ++i) {
      char c = s[i];
      if (escaped) {
        escaped = false;
        continue;
      }
      if (c == '\\') {
        escaped = in_string;
        continue;
      }
      if (c == '"') {
        in_string = !in_string;
        continue;
      }
      if (in_string) continue;
      if (c == '{') ++depth;
      else if (c == '}') {
        --depth;
        if (depth == 0) return s.substr(start, i - start + 1);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

AgentVerdict parse_verdict_json(const std::string& response) {
  auto blob = first_json_object(response);
  if (!blob) raise(Errc::VerdictUnparseable, "no JSON object in agent response");
  nlohmann::json j = nlohmann::json::parse(*blob, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    raise(Errc::VerdictUnparseable, "agent response JSON does not parse");

  AgentVerdict out;
  auto verdict_it = j.find("verdict");
  if (verdict_it == j.end() || !verdict_it->is_string())
    raise(Errc::VerdictUnparseable, "verdict field missing or not a string");
  std::string verdict = text::to_lower(verdict_it->get<std::string>());
  if (verdict == "phishing") out.verdict = Verdict::Phishing;
  else if (verdict == "legitimate") out.verdict = Verdict::Legitimate;
  else raise(Errc::VerdictUnparseable, "verdict '" + verdict + "' is neither phishing nor legitimate");

  auto conf_it = j.find("confidence");
  if (conf_it == j.end() || !conf_it->is_number())
    raise(Errc::VerdictUnparseable, "confidence field missing or not a number");
  out.confidence = conf_it->get<double>();
  require(out.confidence >= 0.0 && out.confidence <= 1.0, Errc::ConfidenceOutOfRange,
          "confidence " + std::to_string(out.confidence) + " outside [0, 1]");

  for (const char* key : {"reasons", "rationale", "reason", "explanation"}) {
    auto it = j.find(key);
    if (it == j.end()) continue;
    if (it->is_string()) {
      out.reasons = it->get<std::string>();
    } else if (it->is_array()) {
      std::vector<std::string> parts;
      for (const auto& e : *it)
        if (e.is_string()) parts.push_back(e.get<std::string>());
      out.reasons = text::join(parts, "; ");
    }
    if (!out.reasons.empty()) break;
  }
  require(!out.reasons.empty(), Errc::VerdictUnparseable, "reasons field missing or empty");
  return out;
}

}  // namespace phishguard::agents
