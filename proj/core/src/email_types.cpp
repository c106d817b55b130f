#include "phishguard/email/types.hpp"

#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::email {

const char* to_string(CorpusLabel label) {
  switch (label) {
    case CorpusLabel::Phishing: return "phishing";
    case CorpusLabel::Legitimate: return "legitimate";
    case CorpusLabel::Unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

CorpusLabel corpus_label_from_string(const std::string& s) {
  std::string v = text::to_lower(text::trim(s));
  if (v == "phishing" || v == "phish" || v == "spam" || v == "1") return CorpusLabel::Phishing;
  if (v == "legitimate" || v == "legit" || v == "ham" || v == "0") return CorpusLabel::Legitimate;
  if (v == "unlabeled" || v.empty()) return CorpusLabel::Unlabeled;
  raise(Errc::FormatMismatch, "unknown corpus label '" + s + "'");
}

const char* to_string(AuthVerdict v) {
  switch (v) {
    case AuthVerdict::Pass: return "pass";
    case AuthVerdict::Fail: return "fail";
    case AuthVerdict::None: return "none";
    case AuthVerdict::Missing: return "missing";
  }
  return "missing";
}

int auth_code(AuthVerdict v) {
  switch (v) {
    case AuthVerdict::Pass: return 1;
    case AuthVerdict::Fail: return -1;
    default: return 0;
  }
}

std::string Mailbox::host() const {
  std::size_t at = address.rfind('@');
  if (at == std::string::npos || at + 1 >= address.size()) return "";
  return text::to_lower(address.substr(at + 1));
}

std::optional<std::string> ParsedEmail::header(const std::string& name) const {
  for (const auto& h : headers)
    if (text::iequals(h.name, name)) return h.value;
  return std::nullopt;
}

std::vector<std::string> ParsedEmail::header_all(const std::string& name) const {
  std::vector<std::string> out;
  for (const auto& h : headers)
    if (text::iequals(h.name, name)) out.push_back(h.value);
  return out;
}

}  // namespace phishguard::email
