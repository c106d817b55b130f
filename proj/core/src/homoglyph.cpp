#include "phishguard/email/homoglyph.hpp"

#include <fstream>
#include <sstream>

#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::email {

namespace {

/* Cyrillic and Greek lowercase lookalikes; the first entry per ASCII target
   is the one homoglyph_replace picks. */
constexpr std::string_view kBuiltinTable =
    "# confusables v1: source<TAB>ascii replacement\n"
    "а\ta\n"  // cyrillic a
    "е\te\n"  // cyrillic ie
    "о\to\n"  // cyrillic o
    "р\tp\n"  // cyrillic er
    "с\tc\n"  // cyrillic es
    "у\ty\n"  // cyrillic u
    "х\tx\n"  // cyrillic ha
    "і\ti\n"  // cyrillic byelorussian i
    "ѕ\ts\n"  // cyrillic dze
    "ј\tj\n"  // cyrillic je
    "ԛ\tq\n"  // cyrillic qa
    "ԝ\tw\n"  // cyrillic we
    "һ\th\n"  // cyrillic shha
    "ԁ\td\n"  // cyrillic komi de
    "к\tk\n"  // cyrillic ka
    "т\tt\n"  // cyrillic te
    "м\tm\n"  // cyrillic em
    "ɡ\tg\n"  // latin script g
    "ο\to\n"  // greek omicron
    "α\ta\n"  // greek alpha
    "ν\tv\n"  // greek nu
    "ι\ti\n"  // greek iota
    "κ\tk\n"  // greek kappa
    "ρ\tp\n"  // greek rho
    "τ\tt\n"  // greek tau
    "υ\tu\n"  // greek upsilon
    "χ\tx\n"  // greek chi
    "β\tb\n"  // greek beta
    "ո\tn\n"  // armenian vo
    "օ\to\n"; // armenian oh

bool is_ascii_letter(char32_t cp) {
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

}  // namespace

ConfusableTable ConfusableTable::from_string(std::string_view tsv) {
  ConfusableTable table;
  for (const std::string& line : text::split_lines(tsv)) {
    std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t tab = t.find('\t');
    require(tab != std::string::npos, Errc::FormatMismatch,
            "confusable line needs source<TAB>replacement: '" + t + "'");
    std::u32string src = text::utf8_decode(t.substr(0, tab));
    std::u32string dst = text::utf8_decode(text::trim(t.substr(tab + 1)));
    require(src.size() == 1 && dst.size() == 1, Errc::FormatMismatch,
            "confusable entries map one codepoint to one codepoint: '" + t + "'");
    table.to_ascii_.emplace(src[0], dst[0]);
    table.from_ascii_.emplace(dst[0], src[0]);
  }
  return table;
}

ConfusableTable ConfusableTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoFailure, "cannot open confusable table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

const ConfusableTable& ConfusableTable::builtin() {
  static const ConfusableTable table = from_string(kBuiltinTable);
  return table;
}

std::u32string ConfusableTable::skeleton(std::u32string_view s) const {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    auto it = to_ascii_.find(cp);
    out.push_back(it == to_ascii_.end() ? cp : it->second);
  }
  return out;
}

std::string ConfusableTable::skeleton(std::string_view utf8) const {
  return text::utf8_encode(skeleton(text::utf8_decode(utf8)));
}

bool ConfusableTable::maps_to_ascii(char32_t cp) const {
  auto it = to_ascii_.find(cp);
  return it != to_ascii_.end() && it->second < 0x80;
}

std::optional<char32_t> ConfusableTable::lookalike_for(char32_t ascii) const {
  auto it = from_ascii_.find(ascii);
  if (it == from_ascii_.end()) return std::nullopt;
  return it->second;
}

bool homoglyph_suspect(std::string_view host, const ConfusableTable& table) {
  for (char32_t cp : text::utf8_decode(host)) {
    if (cp < 0x80) continue;
    if (table.maps_to_ascii(cp)) {
      std::u32string one(1, cp);
      if (is_ascii_letter(table.skeleton(one)[0])) return true;
    }
  }
  return false;
}

}  // namespace phishguard::email
