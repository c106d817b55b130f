#include "phishguard/email/features.hpp"

#include <fstream>
#include <sstream>

#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::email {

namespace {

constexpr std::string_view kBuiltinLexicon =
    "# phishguard lexicon v1\n"
    "verify\n"
    "confirm\n"
    "account\n"
    "profile\n"
    "free\n"
    "urgent\n"
    "update\n"
    "password\n";

std::string read_file_or_throw(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoFailure, std::string("cannot open ") + what + " " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Lexicon Lexicon::from_string(std::string_view data) {
  Lexicon lex;
  for (const std::string& line : text::split_lines(data)) {
    std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    lex.words_.push_back(text::to_lower(t));
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  return from_string(read_file_or_throw(path, "lexicon"));
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = from_string(kBuiltinLexicon);
  return lex;
}

bool Lexicon::contains(std::string_view word) const {
  std::string w = text::to_lower(word);
  for (const auto& entry : words_)
    if (entry == w) return true;
  return false;
}

ReputationTable ReputationTable::from_string(std::string_view data) {
  ReputationTable table;
  for (const std::string& line : text::split_lines(data)) {
    std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t tab = t.find('\t');
    require(tab != std::string::npos, Errc::FormatMismatch,
            "reputation line needs domain<TAB>score: '" + t + "'");
    std::string host = text::to_lower(text::trim(t.substr(0, tab)));
    double value = 0.0;
    try {
      value = std::stod(t.substr(tab + 1));
    } catch (const std::exception&) {
      raise(Errc::FormatMismatch, "bad reputation score in '" + t + "'");
    }
    require(value >= -1.0 && value <= 1.0, Errc::OutOfRange,
            "reputation scores live in [-1, 1]: '" + t + "'");
    table.scores_[host] = value;
  }
  return table;
}

ReputationTable ReputationTable::load(const std::filesystem::path& path) {
  return from_string(read_file_or_throw(path, "reputation table"));
}

double ReputationTable::score(std::string_view host) const {
  auto it = scores_.find(text::to_lower(host));
  return it == scores_.end() ? 0.0 : it->second;
}

void ReputationTable::set(const std::string& host, double score) {
  require(score >= -1.0 && score <= 1.0, Errc::OutOfRange, "reputation scores live in [-1, 1]");
  scores_[text::to_lower(host)] = score;
}

std::size_t count_keyword_hits(std::string_view text_block, const Lexicon& lexicon) {
  std::size_t hits = 0;
  for (const auto& word : lexicon.words()) hits += text::count_whole_word(text_block, word);
  return hits;
}

EmailFeatures extract_features(const ParsedEmail& email, const Lexicon& lexicon,
                               const ReputationTable& reputation) {
  EmailFeatures f;
  f.url_count = email.urls.size();
  std::string block = email.subject + "\n" + email.body_text;
  f.keyword_hits = count_keyword_hits(block, lexicon);
  if (email.from) f.domain_reputation = reputation.score(email.from->host());
  f.spf_code = auth_code(email.auth.spf);
  f.dkim_code = auth_code(email.auth.dkim);
  f.dmarc_code = auth_code(email.auth.dmarc);
  return f;
}

}  // namespace phishguard::email
