#include "phishguard/email/urls.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "phishguard/text/strings.hpp"

namespace phishguard::email {

namespace {

bool is_url_stop(char c) {
  switch (c) {
    case ' ': case '\t': case '\r': case '\n': case '\f': case '\v':
    case '<': case '>': case '"': case '\'': case '`':
      return true;
    default:
      return false;
  }
}

constexpr std::string_view kTrailingPunct = ".,;:!?)]}";

bool scheme_at(std::string_view text, std::size_t pos, std::size_t* scheme_len) {
  for (std::string_view scheme : {"https", "http", "ftp"}) {
    if (pos + scheme.size() < text.size() &&
        text::iequals(text.substr(pos, scheme.size()), scheme) &&
        text[pos + scheme.size()] == ':') {
      *scheme_len = scheme.size();
      return true;
    }
  }
  return false;
}

std::string decode_html_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(s[i++]);
      continue;
    }
    std::string_view name = s.substr(i + 1, semi - i - 1);
    if (name == "amp") out.push_back('&');
    else if (name == "lt") out.push_back('<');
    else if (name == "gt") out.push_back('>');
    else if (name == "quot") out.push_back('"');
    else if (name == "apos" || name == "#39") out.push_back('\'');
    else if (name == "nbsp") out.push_back(' ');
    else if (!name.empty() && name[0] == '#') {
      char32_t cp = 0;
      bool ok = true;
      if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) {
        for (char c : name.substr(2)) {
          if (!std::isxdigit(static_cast<unsigned char>(c))) { ok = false; break; }
          cp = cp * 16 + (std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                                                                        : (text::ascii_lower(c) - 'a' + 10));
        }
        ok = ok && name.size() > 2;
      } else {
        for (char c : name.substr(1)) {
          if (!std::isdigit(static_cast<unsigned char>(c))) { ok = false; break; }
          cp = cp * 10 + (c - '0');
        }
        ok = ok && name.size() > 1;
      }
      if (!ok) {
        out.push_back(s[i++]);
        continue;
      }
      out += text::utf8_encode(cp);
    } else {
      out.push_back(s[i++]);
      continue;
    }
    i = semi + 1;
  }
  return out;
}

bool looks_like_ipv4(std::string_view host) {
  int parts = 0;
  std::size_t pos = 0;
  while (pos <= host.size()) {
    std::size_t dot = host.find('.', pos);
    std::string_view seg = host.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    if (seg.empty() || seg.size() > 3) return false;
    int value = 0;
    for (char c : seg) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
      value = value * 10 + (c - '0');
    }
    if (value > 255) return false;
    ++parts;
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return parts == 4;
}

}  // namespace

std::vector<UrlSpan> find_url_spans(std::string_view text) {
  std::vector<UrlSpan> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t scheme_len = 0;
    if (!scheme_at(text, i, &scheme_len)) {
      ++i;
      continue;
    }
    bool boundary = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
    if (!boundary) {
      ++i;
      continue;
    }
    std::size_t end = i + scheme_len + 1;
    while (end < text.size() && !is_url_stop(text[end])) ++end;
    while (end > i + scheme_len + 1 && kTrailingPunct.find(text[end - 1]) != std::string_view::npos)
      --end;
    std::size_t body_start = i + scheme_len + 1;
    std::size_t body = end - body_start;
    std::string_view rest = text.substr(body_start, body);
    if (rest.starts_with("//")) rest.remove_prefix(2);
    if (rest.empty()) {
      i = end + 1;
      continue;
    }
    spans.push_back({i, end - i});
    i = end + 1;
  }
  return spans;
}

std::string url_host(std::string_view raw) {
  std::size_t colon = raw.find(':');
  if (colon == std::string_view::npos) return "";
  std::string_view rest = raw.substr(colon + 1);
  if (rest.starts_with("//")) rest.remove_prefix(2);
  std::size_t end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, end);
  std::size_t at = authority.rfind('@');
  if (at != std::string_view::npos) authority.remove_prefix(at + 1);
  if (authority.starts_with("[")) {
    std::size_t close = authority.find(']');
    if (close != std::string_view::npos) return text::to_lower(authority.substr(1, close - 1));
    return text::to_lower(authority.substr(1));
  }
  std::size_t port = authority.rfind(':');
  if (port != std::string_view::npos) {
    std::string_view tail = authority.substr(port + 1);
    bool digits = !tail.empty() && std::all_of(tail.begin(), tail.end(), [](char c) {
      return std::isdigit(static_cast<unsigned char>(c));
    });
    if (digits) authority = authority.substr(0, port);
  }
  return text::to_lower(authority);
}

UrlRecord make_url_record(std::string_view raw, std::string_view display,
                          const ConfusableTable& table) {
  UrlRecord rec;
  rec.raw = std::string(raw);
  rec.display_text = std::string(display);
  rec.host = url_host(raw);
  rec.is_ip_host = looks_like_ipv4(rec.host) || rec.host.find(':') != std::string::npos;
  std::size_t colon = raw.find(':');
  if (colon != std::string_view::npos) {
    std::string_view rest = raw.substr(colon + 1);
    if (rest.starts_with("//")) rest.remove_prefix(2);
    std::size_t slash = rest.find('/');
    if (slash != std::string_view::npos) {
      std::string_view path = rest.substr(slash);
      std::size_t stop = path.find_first_of("?#");
      rec.path_length = stop == std::string_view::npos ? path.size() : stop;
    }
  }
  rec.homoglyph_suspect = homoglyph_suspect(rec.host, table);
  return rec;
}

namespace {

void scan_plain_text(std::string_view body, std::vector<UrlRecord>* out,
                     std::unordered_set<std::string>* seen) {
  for (const UrlSpan& span : find_url_spans(body)) {
    std::string_view raw = body.substr(span.offset, span.length);
    if (!seen->insert(std::string(raw)).second) continue;
    out->push_back(make_url_record(raw, raw));
  }
}

void scan_html_hrefs(std::string_view html, std::vector<UrlRecord>* out,
                     std::unordered_set<std::string>* seen) {
  std::string lower = text::to_lower(html);
  std::size_t pos = 0;
  while (true) {
    std::size_t href = lower.find("href", pos);
    if (href == std::string::npos) break;
    std::size_t eq = href + 4;
    while (eq < html.size() && std::isspace(static_cast<unsigned char>(html[eq]))) ++eq;
    if (eq >= html.size() || html[eq] != '=') {
      pos = href + 4;
      continue;
    }
    ++eq;
    while (eq < html.size() && std::isspace(static_cast<unsigned char>(html[eq]))) ++eq;
    if (eq >= html.size()) break;
    std::string value;
    std::size_t value_end = eq;
    if (html[eq] == '"' || html[eq] == '\'') {
      char quote = html[eq];
      std::size_t close = html.find(quote, eq + 1);
      if (close == std::string::npos) break;
      value = std::string(html.substr(eq + 1, close - eq - 1));
      value_end = close + 1;
    } else {
      std::size_t end = eq;
      while (end < html.size() && !std::isspace(static_cast<unsigned char>(html[end])) &&
             html[end] != '>')
        ++end;
      value = std::string(html.substr(eq, end - eq));
      value_end = end;
    }
    pos = value_end;
    value = text::trim(decode_html_entities(value));
    std::size_t scheme_len = 0;
    if (value.empty() || !scheme_at(value, 0, &scheme_len)) continue;

    std::string display;
    std::size_t tag_close = html.find('>', value_end);
    if (tag_close != std::string::npos) {
      std::size_t anchor_end = lower.find("</a", tag_close);
      if (anchor_end != std::string::npos) {
        std::string inner(html.substr(tag_close + 1, anchor_end - tag_close - 1));
        std::string plain;
        bool in_tag = false;
        for (char c : inner) {
          if (c == '<') in_tag = true;
          else if (c == '>') in_tag = false;
          else if (!in_tag) plain.push_back(c);
        }
        display = text::trim(decode_html_entities(plain));
      }
    }
    if (!seen->insert(value).second) continue;
    out->push_back(make_url_record(value, display.empty() ? std::string_view(value) : display));
  }
}

}  // namespace

std::vector<UrlRecord> extract_urls(const ParsedEmail& email) {
  std::vector<UrlRecord> out;
  std::unordered_set<std::string> seen;
  scan_plain_text(email.body_text, &out, &seen);
  scan_html_hrefs(email.body_html, &out, &seen);
  return out;
}

}  // namespace phishguard::email
