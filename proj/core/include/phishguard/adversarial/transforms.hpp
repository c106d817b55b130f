#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phishguard/email/homoglyph.hpp"

namespace phishguard::adversarial {

/* Ordered keyword -> alternatives map. File format: one
   `key<TAB>alt[<TAB>alt...]` line per entry, '#' comments. */
class SynonymTable {
public:
  static const SynonymTable& builtin();
  static SynonymTable load(const std::filesystem::path& path);
  static SynonymTable from_string(std::string_view data);

  using Entry = std::pair<std::string, std::vector<std::string>>;
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

private:
  std::vector<Entry> entries_;
};

struct TransformResult {
  std::string text;
  std::size_t replacements = 0;
};

const std::vector<std::string>& neutral_sentence_pool();
const std::vector<std::string>& default_brand_tokens();

/* Whole-word, case-preserving substitution. Matches are located on the input
   text only, so a replacement never cascades into further substitutions. */
TransformResult synonym_substitute(std::string_view text, const SynonymTable& table,
                                   std::uint64_t seed);

/* Swaps ceil(intensity * eligible) lowercase ASCII letters inside URL hosts
   and brand-token occurrences for their non-ASCII lookalikes. intensity is
   clamped onto [0, 1]. The output skeleton-equals the input. */
TransformResult homoglyph_replace(std::string_view text, double intensity, std::uint64_t seed,
                                  const email::ConfusableTable& table = email::ConfusableTable::builtin(),
                                  const std::vector<std::string>& brand_tokens = default_brand_tokens());

/* Adds one pool sentence as a new paragraph after the first paragraph. */
TransformResult insert_neutral_sentence(std::string_view text, std::uint64_t seed);

}  // namespace phishguard::adversarial
