#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "phishguard/email/homoglyph.hpp"
#include "phishguard/email/types.hpp"

namespace phishguard::email {

struct UrlSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
};

/* Plain-text scanner for http/https/ftp URLs. Accepts schemes without the
   double slash (wild phishing mail uses `https:host/...`), stops at
   whitespace and angle/quote delimiters, trims trailing punctuation. */
std::vector<UrlSpan> find_url_spans(std::string_view text);

/* Authority parsing on the raw URL string; host is lowercased (ASCII). */
std::string url_host(std::string_view raw);

UrlRecord make_url_record(std::string_view raw, std::string_view display,
                          const ConfusableTable& table = ConfusableTable::builtin());

/* Union of plain-text matches in body_text and href targets in body_html,
   deduplicated by raw string, first appearance first. */
std::vector<UrlRecord> extract_urls(const ParsedEmail& email);

}  // namespace phishguard::email
