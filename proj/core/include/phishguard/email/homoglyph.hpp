#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace phishguard::email {

/* Maps visually confusable non-ASCII codepoints to the ASCII letters they
   imitate. File format: one `source<TAB>replacement` pair per line, both as
   literal UTF-8, '#' starts a comment. */
class ConfusableTable {
public:
  static const ConfusableTable& builtin();
  static ConfusableTable load(const std::filesystem::path& path);
  static ConfusableTable from_string(std::string_view tsv);

  /* Every codepoint replaced by its ASCII target when one exists. */
  std::u32string skeleton(std::u32string_view s) const;
  std::string skeleton(std::string_view utf8) const;

  bool maps_to_ascii(char32_t cp) const;

  /* Preferred non-ASCII lookalike for an ASCII letter (first table entry
     with that target), used by the adversarial transform. */
  std::optional<char32_t> lookalike_for(char32_t ascii) const;

  std::size_t size() const { return to_ascii_.size(); }

private:
  std::unordered_map<char32_t, char32_t> to_ascii_;
  std::unordered_map<char32_t, char32_t> from_ascii_;
};

/* True when the host contains at least one non-ASCII codepoint whose
   skeleton is an ASCII letter: the host renders like an ASCII name it is not. */
bool homoglyph_suspect(std::string_view host, const ConfusableTable& table = ConfusableTable::builtin());

}  // namespace phishguard::email
