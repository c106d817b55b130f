#pragma once

#include <optional>
#include <string>
#include <vector>

namespace phishguard::email {

enum class CorpusLabel { Phishing, Legitimate, Unlabeled };

const char* to_string(CorpusLabel label);
CorpusLabel corpus_label_from_string(const std::string& s);

struct RawEmail {
  std::string source_id;
  std::string bytes;
  CorpusLabel label = CorpusLabel::Unlabeled;
};

struct HeaderField {
  std::string name;
  std::string value;
};

enum class AuthVerdict { Pass, Fail, None, Missing };

const char* to_string(AuthVerdict v);

struct AuthResults {
  AuthVerdict spf = AuthVerdict::Missing;
  AuthVerdict dkim = AuthVerdict::Missing;
  AuthVerdict dmarc = AuthVerdict::Missing;
};

/* Pass -> +1, Fail -> -1, None/Missing -> 0. */
int auth_code(AuthVerdict v);

struct Mailbox {
  std::string display_name;
  std::string address;

  /* Part after '@', lowercased; empty when the address has no '@'. */
  std::string host() const;
};

struct UrlRecord {
  std::string raw;
  std::string display_text;
  std::string host;
  bool is_ip_host = false;
  std::size_t path_length = 0;
  bool homoglyph_suspect = false;
};

struct ParsedEmail {
  std::string source_id;
  std::vector<HeaderField> headers;
  std::string subject;
  std::optional<Mailbox> from;
  std::optional<Mailbox> reply_to;
  std::optional<Mailbox> return_path;
  std::vector<std::string> received_chain;
  std::string body_text;
  std::string body_html;
  std::vector<UrlRecord> urls;
  AuthResults auth;
  CorpusLabel label = CorpusLabel::Unlabeled;
  std::vector<std::string> diagnostics;

  /* First matching header value, case-insensitive name; headers keep file order. */
  std::optional<std::string> header(const std::string& name) const;
  std::vector<std::string> header_all(const std::string& name) const;
};

}  // namespace phishguard::email
