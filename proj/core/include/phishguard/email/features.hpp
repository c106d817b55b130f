#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "phishguard/email/types.hpp"

namespace phishguard::email {

/* Ordered keyword list. File format: one token per line, '#' comments. */
class Lexicon {
public:
  static const Lexicon& builtin();
  static Lexicon load(const std::filesystem::path& path);
  static Lexicon from_string(std::string_view data);

  const std::vector<std::string>& words() const { return words_; }
  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

private:
  std::vector<std::string> words_;
};

/* Local domain scores in [-1, 1]: allowlist entries positive, denylist
   negative, unknown hosts 0. File format: `domain<TAB>score` per line. */
class ReputationTable {
public:
  static ReputationTable load(const std::filesystem::path& path);
  static ReputationTable from_string(std::string_view data);
  ReputationTable() = default;

  double score(std::string_view host) const;
  void set(const std::string& host, double score);
  std::size_t size() const { return scores_.size(); }

private:
  std::unordered_map<std::string, double> scores_;
};

struct EmailFeatures {
  std::size_t url_count = 0;
  std::size_t keyword_hits = 0;
  double domain_reputation = 0.0;
  int spf_code = 0;
  int dkim_code = 0;
  int dmarc_code = 0;
};

/* keyword_hits counts every case-insensitive whole-word lexicon occurrence
   in subject and body_text; domain_reputation looks up the From host. */
EmailFeatures extract_features(const ParsedEmail& email, const Lexicon& lexicon = Lexicon::builtin(),
                               const ReputationTable& reputation = ReputationTable());

std::size_t count_keyword_hits(std::string_view text_block, const Lexicon& lexicon);

}  // namespace phishguard::email
