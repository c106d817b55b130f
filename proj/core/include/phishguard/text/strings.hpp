#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace phishguard::text {

/* UTF-8 codec. Decoding is lossy: malformed byte sequences become U+FFFD so
   arbitrary corpus bytes never abort a run. */
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
std::string utf8_encode(char32_t cp);
bool is_valid_utf8(std::string_view s);

bool is_space(char32_t cp);

std::string to_lower(std::string_view s);
char ascii_lower(char c);
std::string trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);
std::string_view strip_eol(std::string_view line);

/* Splits on \n, tolerating \r\n. A trailing newline does not produce an
   empty final element. */
std::vector<std::string> split_lines(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

/* Shared tokenizer for keyword counting and every text-quality metric:
   lowercase, split on Unicode whitespace, strip ASCII punctuation from token
   edges, drop tokens that end up empty. */
std::vector<std::string> tokenize(std::string_view s);

/* Case-insensitive whole-word occurrence count; word boundaries are
   non-alphanumeric ASCII bytes or the string edges. */
std::size_t count_whole_word(std::string_view haystack, std::string_view word);

struct WordSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
};

/* Byte spans of whole-word matches, in order of appearance. */
std::vector<WordSpan> find_whole_words(std::string_view haystack, std::string_view word);

std::string replace_all(std::string_view s, std::string_view from, std::string_view to);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace phishguard::text
