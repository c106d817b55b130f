#include "phishguard/adversarial/transforms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "phishguard/email/urls.hpp"
#include "phishguard/errors.hpp"
#include "phishguard/num/rng.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::adversarial {

namespace {

/* verify->confirm and account->profile deliberately stay inside the default
   detection lexicon; the rest map out of it so substitution actually lowers
   keyword counts. */
constexpr std::string_view kBuiltinSynonyms =
    "# phishguard synonyms v1: key<TAB>alternative[<TAB>alternative]\n"
    "verify\tconfirm\n"
    "account\tprofile\n"
    "free\tno money is needed\tcomplimentary\n"
    "urgent\tpressing\ttime-sensitive\n"
    "update\trefresh\n"
    "password\tpasscode\n"
    "confirm\tvalidate\n"
    "immediately\tpromptly\tright away\n"
    "click\ttap\n"
    "suspended\tpaused\n";

const std::vector<std::string> kNeutralSentences = {
    "We hope this email serves you well.",
    "Thank you for being a valued customer.",
    "We appreciate your continued trust in our services.",
    "Please do not hesitate to reach out with any questions.",
};

const std::vector<std::string> kBrandTokens = {
    "paypal", "amazon", "apple", "microsoft", "netflix", "google", "bank",
};

enum class CaseShape { Lower, Capitalized, Upper };

CaseShape case_shape(std::string_view word) {
  bool first_upper = !word.empty() && std::isupper(static_cast<unsigned char>(word[0]));
  if (!first_upper) return CaseShape::Lower;
  bool rest_upper = word.size() > 1;
  for (std::size_t i = 1; i < word.size(); ++i)
    rest_upper = rest_upper && (!std::isalpha(static_cast<unsigned char>(word[i])) ||
                                std::isupper(static_cast<unsigned char>(word[i])));
  return rest_upper ? CaseShape::Upper : CaseShape::Capitalized;
}

std::string apply_case(std::string_view replacement, CaseShape shape) {
  std::string out(replacement);
  switch (shape) {
    case CaseShape::Lower:
      break;
    case CaseShape::Capitalized:
      if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
      break;
    case CaseShape::Upper:
      for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
  }
  return out;
}

/* Byte span of the host inside a raw URL string. */
std::pair<std::size_t, std::size_t> host_span(std::string_view raw) {
  std::size_t colon = raw.find(':');
  if (colon == std::string_view::npos) return {0, 0};
  std::size_t start = colon + 1;
  if (raw.substr(start).rfind("//", 0) == 0) start += 2;
  std::size_t end = start;
  while (end < raw.size() && raw[end] != '/' && raw[end] != '?' && raw[end] != '#') ++end;
  std::string_view authority = raw.substr(start, end - start);
  std::size_t at = authority.rfind('@');
  if (at != std::string_view::npos) start += at + 1;
  return {start, end - start};
}

}  // namespace

SynonymTable SynonymTable::from_string(std::string_view data) {
  SynonymTable table;
  for (const std::string& line : text::split_lines(data)) {
    std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> cells = text::split(t, '\t');
    require(cells.size() >= 2, Errc::FormatMismatch,
            "synonym line needs key<TAB>alternative: '" + t + "'");
    Entry entry;
    entry.first = text::to_lower(text::trim(cells[0]));
    for (std::size_t i = 1; i < cells.size(); ++i) {
      std::string alt = text::trim(cells[i]);
      if (!alt.empty()) entry.second.push_back(alt);
    }
    require(!entry.first.empty() && !entry.second.empty(), Errc::FormatMismatch,
            "empty synonym entry: '" + t + "'");
    table.entries_.push_back(std::move(entry));
  }
  return table;
}

SynonymTable SynonymTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoFailure, "cannot open synonym table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

const SynonymTable& SynonymTable::builtin() {
  static const SynonymTable table = from_string(kBuiltinSynonyms);
  return table;
}

TransformResult synonym_substitute(std::string_view input, const SynonymTable& table,
                                   std::uint64_t seed) {
  num::RngStream rng(seed);
  struct Planned {
    std::size_t offset;
    std::size_t length;
    std::string replacement;
  };
  std::vector<Planned> plan;
  std::vector<std::pair<std::size_t, std::size_t>> taken;
  auto overlaps = [&](std::size_t off, std::size_t len) {
    for (const auto& [o, l] : taken)
      if (off < o + l && o < off + len) return true;
    return false;
  };
  for (const auto& [key, alternatives] : table.entries()) {
    for (const auto& span : text::find_whole_words(input, key)) {
      if (overlaps(span.offset, span.length)) continue;
      std::string_view matched = input.substr(span.offset, span.length);
      const std::string& alt = alternatives.size() == 1
                                   ? alternatives[0]
                                   : alternatives[rng.uniform_index(alternatives.size())];
      plan.push_back({span.offset, span.length, apply_case(alt, case_shape(matched))});
      taken.emplace_back(span.offset, span.length);
    }
  }
  std::sort(plan.begin(), plan.end(),
            [](const Planned& a, const Planned& b) { return a.offset < b.offset; });
  TransformResult result;
  result.replacements = plan.size();
  std::size_t pos = 0;
  for (const auto& p : plan) {
    result.text.append(input.substr(pos, p.offset - pos));
    result.text.append(p.replacement);
    pos = p.offset + p.length;
  }
  result.text.append(input.substr(pos));
  return result;
}

TransformResult homoglyph_replace(std::string_view input, double intensity, std::uint64_t seed,
                                  const email::ConfusableTable& table,
                                  const std::vector<std::string>& brand_tokens) {
  intensity = std::clamp(intensity, 0.0, 1.0);
  std::vector<std::pair<std::size_t, std::size_t>> zones;
  for (const auto& span : email::find_url_spans(input)) {
    auto [h_off, h_len] = host_span(input.substr(span.offset, span.length));
    if (h_len > 0) zones.emplace_back(span.offset + h_off, h_len);
  }
  for (const auto& brand : brand_tokens)
    for (const auto& span : text::find_whole_words(input, brand))
      zones.emplace_back(span.offset, span.length);

  std::vector<std::size_t> eligible;
  for (const auto& [off, len] : zones) {
    for (std::size_t i = off; i < off + len && i < input.size(); ++i) {
      char c = input[i];
      if (c >= 'a' && c <= 'z' && table.lookalike_for(static_cast<char32_t>(c)))
        eligible.push_back(i);
    }
  }
  std::sort(eligible.begin(), eligible.end());
  eligible.erase(std::unique(eligible.begin(), eligible.end()), eligible.end());

  TransformResult result;
  if (eligible.empty() || intensity == 0.0) {
    result.text = std::string(input);
    return result;
  }
  std::size_t k = static_cast<std::size_t>(
      std::ceil(intensity * static_cast<double>(eligible.size())));
  k = std::min(k, eligible.size());
  num::RngStream rng(seed);
  rng.shuffle(eligible);
  eligible.resize(k);
  std::sort(eligible.begin(), eligible.end());

  std::size_t pos = 0;
  for (std::size_t index : eligible) {
    result.text.append(input.substr(pos, index - pos));
    char32_t look = *table.lookalike_for(static_cast<char32_t>(input[index]));
    result.text.append(text::utf8_encode(look));
    pos = index + 1;
  }
  result.text.append(input.substr(pos));
  result.replacements = k;
  return result;
}

TransformResult insert_neutral_sentence(std::string_view input, std::uint64_t seed) {
  num::RngStream rng(seed);
  const std::string& sentence =
      kNeutralSentences[rng.uniform_index(kNeutralSentences.size())];
  TransformResult result;
  result.replacements = 1;
  std::size_t para = input.find("\n\n");
  if (para == std::string_view::npos) {
    result.text = std::string(input);
    if (!result.text.empty() && result.text.back() != '\n') result.text.push_back('\n');
    result.text += "\n" + sentence + "\n";
  } else {
    result.text = std::string(input.substr(0, para));
    result.text += "\n\n" + sentence + "\n";
    result.text += std::string(input.substr(para + 1));
  }
  return result;
}

const std::vector<std::string>& neutral_sentence_pool() { return kNeutralSentences; }

const std::vector<std::string>& default_brand_tokens() { return kBrandTokens; }

}  // namespace phishguard::adversarial
