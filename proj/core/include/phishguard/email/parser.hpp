#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "phishguard/email/types.hpp"

namespace phishguard::email {

/* RFC 5322 tolerant parse: folded headers, nested multipart (text/plain
   preferred), base64 / quoted-printable transfer encodings, HTML fallback
   body, lossy UTF-8. Throws UnparseableMessage only when no header block can
   be located; recoverable defects land in ParsedEmail::diagnostics. */
ParsedEmail parse_eml(const RawEmail& raw);

/* First spf=/dkim=/dmarc= token across Authentication-Results headers wins;
   verdicts outside pass/fail/none downgrade to None with a diagnostic;
   absent mechanisms stay Missing. */
AuthResults parse_auth_results(const std::vector<HeaderField>& headers,
                               std::vector<std::string>* diagnostics = nullptr);

Mailbox parse_mailbox(std::string_view field);

std::string decode_quoted_printable(std::string_view s, bool underscore_is_space = false);
std::string decode_base64(std::string_view s);

/* RFC 2047 encoded-words in a header value (B and Q forms). */
std::string decode_header_value(std::string_view value);

std::string html_to_text(std::string_view html);

}  // namespace phishguard::email
