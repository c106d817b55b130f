#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phishguard/email/types.hpp"

namespace phishguard::email {

enum class CorpusFormat { Auto, EmlDir, Mbox, Csv };

CorpusFormat corpus_format_from_string(const std::string& s);

struct LoadOptions {
  std::optional<CorpusLabel> label_override;
  /* CSV column names, matched case-insensitively against the header row. */
  std::string body_column = "body";
  std::string subject_column = "subject";
  std::string sender_column = "sender";
  std::string label_column = "label";
};

/* EmlDir: every regular file under the directory, sorted by relative path;
   label from label_override, else inferred from path components containing
   "phish" / "ham" / "legit". Mbox: classic `From ` separators. Csv: header
   row plus one message per record; a missing body column is FormatMismatch. */
std::vector<RawEmail> load_corpus(const std::filesystem::path& path, CorpusFormat format,
                                  const LoadOptions& options = {});

/* RFC 4180 field splitter shared with the CLI (quotes, embedded separators
   and newlines). */
std::vector<std::vector<std::string>> parse_csv(std::string_view data);

}  // namespace phishguard::email
