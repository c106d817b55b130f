#include "phishguard/email/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "phishguard/email/urls.hpp"
#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::email {

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string latin1_to_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::string ensure_utf8(std::string_view s, std::string_view charset,
                        std::vector<std::string>* diagnostics) {
  std::string cs = text::to_lower(text::trim(charset));
  if (cs == "iso-8859-1" || cs == "latin1" || cs == "iso_8859-1" || cs == "windows-1252" ||
      cs == "cp1252")
    return latin1_to_utf8(s);
  if (text::is_valid_utf8(s)) return std::string(s);
  if (diagnostics)
    diagnostics->push_back("invalid UTF-8 in " + (cs.empty() ? std::string("body") : cs) +
                           " content, replaced bad sequences");
  return text::utf8_encode(text::utf8_decode(s));
}

struct ContentType {
  std::string type = "text";
  std::string subtype = "plain";
  std::string charset;
  std::string boundary;
};

ContentType parse_content_type(std::string_view value) {
  ContentType ct;
  std::vector<std::string> parts;
  std::string current;
  bool quoted = false;
  for (char c : value) {
    if (c == '"') {
      quoted = !quoted;
      current.push_back(c);
    } else if (c == ';' && !quoted) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  if (!parts.empty()) {
    std::string main = text::to_lower(text::trim(parts[0]));
    std::size_t slash = main.find('/');
    if (slash != std::string::npos) {
      ct.type = main.substr(0, slash);
      ct.subtype = main.substr(slash + 1);
    } else if (!main.empty()) {
      ct.type = main;
      ct.subtype.clear();
    }
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    std::string p = text::trim(parts[i]);
    std::size_t eq = p.find('=');
    if (eq == std::string::npos) continue;
    std::string key = text::to_lower(text::trim(p.substr(0, eq)));
    std::string val = text::trim(p.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    if (key == "charset") ct.charset = val;
    else if (key == "boundary") ct.boundary = val;
  }
  return ct;
}

struct HeaderBlock {
  std::vector<HeaderField> fields;
  std::size_t body_offset = 0;  // byte offset just past the blank separator
  bool found_separator = false;
};

HeaderBlock split_headers(std::string_view bytes, std::vector<std::string>* diagnostics) {
  HeaderBlock block;
  std::size_t pos = 0;
  std::string name, value;
  bool first_line = true;
  auto flush = [&] {
    if (!name.empty()) block.fields.push_back({name, text::trim(value)});
    name.clear();
    value.clear();
  };
  while (pos <= bytes.size()) {
    std::size_t nl = bytes.find('\n', pos);
    std::string_view line;
    std::size_t next;
    if (nl == std::string_view::npos) {
      line = bytes.substr(pos);
      next = bytes.size() + 1;
    } else {
      line = bytes.substr(pos, nl - pos);
      next = nl + 1;
    }
    line = text::strip_eol(line);
    if (line.empty()) {
      flush();
      block.body_offset = next > bytes.size() ? bytes.size() : next;
      block.found_separator = true;
      return block;
    }
    if (first_line && line.size() > 5 && line.substr(0, 5) == "From " ) {
      if (diagnostics) diagnostics->push_back("skipped mbox From line inside message");
      first_line = false;
      pos = next;
      continue;
    }
    first_line = false;
    if (line[0] == ' ' || line[0] == '\t') {
      if (name.empty()) {
        if (diagnostics) diagnostics->push_back("continuation line before any header, ignored");
      } else {
        value.push_back(' ');
        std::string_view cont = line;
        while (!cont.empty() && (cont[0] == ' ' || cont[0] == '\t')) cont.remove_prefix(1);
        value.append(cont);
      }
      pos = next;
      continue;
    }
    std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      flush();
      if (diagnostics)
        diagnostics->push_back("malformed header line ignored: '" + std::string(line.substr(0, 40)) + "'");
      pos = next;
      continue;
    }
    flush();
    name = std::string(text::trim(line.substr(0, colon)));
    value = std::string(line.substr(colon + 1));
    if (!value.empty() && value[0] == ' ') value.erase(0, 1);
    pos = next;
  }
  flush();
  block.body_offset = bytes.size();
  return block;
}

std::string decode_transfer_encoding(std::string_view body, std::string_view encoding,
                                     std::vector<std::string>* diagnostics) {
  std::string enc = text::to_lower(text::trim(encoding));
  if (enc == "base64") return decode_base64(body);
  if (enc == "quoted-printable") return decode_quoted_printable(body);
  if (enc.empty() || enc == "7bit" || enc == "8bit" || enc == "binary") return std::string(body);
  if (diagnostics)
    diagnostics->push_back("unknown transfer encoding '" + enc + "', treated as identity");
  return std::string(body);
}

struct BodyParts {
  std::vector<std::string> plain;
  std::vector<std::string> html;
};

void walk_part(std::string_view part, int depth, BodyParts* out,
               std::vector<std::string>* diagnostics) {
  if (depth > 8) {
    diagnostics->push_back("multipart nesting deeper than 8, inner parts ignored");
    return;
  }
  HeaderBlock block = split_headers(part, diagnostics);
  std::string_view body = part.substr(block.body_offset);
  auto find = [&](std::string_view name) -> std::string {
    for (const auto& h : block.fields)
      if (text::iequals(h.name, name)) return h.value;
    return "";
  };
  ContentType ct = parse_content_type(find("Content-Type"));
  if (ct.type == "multipart") {
    if (ct.boundary.empty()) {
      diagnostics->push_back("multipart without boundary, treated as text/plain");
      out->plain.push_back(ensure_utf8(body, ct.charset, diagnostics));
      return;
    }
    std::string open = "--" + ct.boundary;
    std::vector<std::string> lines = text::split_lines(body);
    std::vector<std::string> current;
    bool inside = false;
    bool terminated = false;
    auto flush_part = [&] {
      if (!inside || current.empty()) {
        current.clear();
        return;
      }
      std::string joined = text::join(current, "\n");
      current.clear();
      walk_part(joined, depth + 1, out, diagnostics);
    };
    for (const std::string& line : lines) {
      std::string t = text::trim(line);
      if (t == open + "--") {
        flush_part();
        inside = false;
        terminated = true;
        break;
      }
      if (t == open) {
        flush_part();
        inside = true;
        continue;
      }
      if (inside) current.push_back(line);
    }
    flush_part();
    if (!terminated) diagnostics->push_back("multipart boundary never terminated");
    return;
  }
  if (ct.type == "message" && ct.subtype == "rfc822") {
    walk_part(body, depth + 1, out, diagnostics);
    return;
  }
  if (ct.type != "text") return;
  std::string decoded = decode_transfer_encoding(body, find("Content-Transfer-Encoding"), diagnostics);
  decoded = ensure_utf8(decoded, ct.charset, diagnostics);
  if (ct.subtype == "html") out->html.push_back(std::move(decoded));
  else out->plain.push_back(std::move(decoded));
}

std::string normalize_newlines(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\r') {
      if (i + 1 < s.size() && s[i + 1] == '\n') continue;
      out.push_back('\n');
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace

std::string decode_quoted_printable(std::string_view s, bool underscore_is_space) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '_' && underscore_is_space) {
      out.push_back(' ');
      continue;
    }
    if (c != '=') {
      out.push_back(c);
      continue;
    }
    if (i + 1 < s.size() && (s[i + 1] == '\n' || (s[i + 1] == '\r' && i + 2 < s.size() && s[i + 2] == '\n'))) {
      i += s[i + 1] == '\n' ? 1 : 2;  // soft break
      continue;
    }
    if (i + 2 < s.size()) {
      int hi = hex_digit(s[i + 1]);
      int lo = hex_digit(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(c);
  }
  return out;
}

std::string decode_base64(std::string_view s) {
  static constexpr auto table = [] {
    std::array<int, 256> t{};
    t.fill(-1);
    const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(alphabet[i])] = i;
    return t;
  }();
  std::string out;
  out.reserve(s.size() * 3 / 4);
  int acc = 0;
  int bits = 0;
  for (char c : s) {
    if (c == '=') break;
    int v = table[static_cast<unsigned char>(c)];
    if (v < 0) continue;
    acc = (acc << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

std::string decode_header_value(std::string_view value) {
  std::string out;
  std::size_t i = 0;
  bool last_was_encoded = false;
  while (i < value.size()) {
    std::size_t start = value.find("=?", i);
    if (start == std::string_view::npos) {
      out.append(value.substr(i));
      break;
    }
    std::size_t q1 = value.find('?', start + 2);
    std::size_t q2 = q1 == std::string_view::npos ? q1 : value.find('?', q1 + 1);
    std::size_t close = q2 == std::string_view::npos ? q2 : value.find("?=", q2 + 1);
    if (close == std::string_view::npos) {
      out.append(value.substr(i));
      break;
    }
    std::string_view between = value.substr(i, start - i);
    bool only_ws = !between.empty() &&
                   std::all_of(between.begin(), between.end(),
                               [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (!(last_was_encoded && only_ws)) out.append(between);
    std::string charset(value.substr(start + 2, q1 - start - 2));
    char enc = q1 + 1 < value.size() ? text::ascii_lower(value[q1 + 1]) : 'q';
    std::string_view payload = value.substr(q2 + 1, close - q2 - 1);
    std::string decoded = enc == 'b' ? decode_base64(payload)
                                     : decode_quoted_printable(payload, true);
    out.append(ensure_utf8(decoded, charset, nullptr));
    last_was_encoded = true;
    i = close + 2;
  }
  return out;
}

std::string html_to_text(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  std::size_t i = 0;
  bool skipping = false;  // inside <style> or <script>
  std::string skip_until;
  while (i < html.size()) {
    char c = html[i];
    if (skipping) {
      if (c == '<' && text::istarts_with(html.substr(i), skip_until)) {
        skipping = false;
        i += skip_until.size();
        std::size_t close = html.find('>', i);
        i = close == std::string_view::npos ? html.size() : close + 1;
        continue;
      }
      ++i;
      continue;
    }
    if (c == '<') {
      std::size_t close = html.find('>', i);
      if (close == std::string_view::npos) break;
      std::string_view inner = html.substr(i + 1, close - i - 1);
      std::string t;
      for (char tc : inner) {
        if (std::isalpha(static_cast<unsigned char>(tc)) || tc == '/') t.push_back(text::ascii_lower(tc));
        else break;
      }
      if (t == "style") {
        skipping = true;
        skip_until = "</style";
      } else if (t == "script") {
        skipping = true;
        skip_until = "</script";
      } else if (t == "br" || t == "/p" || t == "/div" || t == "/tr" || t == "/li" || t == "p" ||
                 t == "/h1" || t == "/h2" || t == "/h3" || t == "/table") {
        out.push_back('\n');
      }
      i = close + 1;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  std::string decoded;
  decoded.reserve(out.size());
  {
    std::string tmp;
    tmp.swap(out);
    std::size_t p = 0;
    while (p < tmp.size()) {
      if (tmp[p] == '&') {
        std::size_t semi = tmp.find(';', p);
        if (semi != std::string::npos && semi - p <= 10) {
          std::string_view name = std::string_view(tmp).substr(p + 1, semi - p - 1);
          if (name == "amp") { decoded.push_back('&'); p = semi + 1; continue; }
          if (name == "lt") { decoded.push_back('<'); p = semi + 1; continue; }
          if (name == "gt") { decoded.push_back('>'); p = semi + 1; continue; }
          if (name == "quot") { decoded.push_back('"'); p = semi + 1; continue; }
          if (name == "apos" || name == "#39") { decoded.push_back('\''); p = semi + 1; continue; }
          if (name == "nbsp") { decoded.push_back(' '); p = semi + 1; continue; }
        }
      }
      decoded.push_back(tmp[p++]);
    }
  }
  /* collapse runs of blank lines and trailing spaces */
  std::vector<std::string> lines = text::split_lines(decoded);
  std::vector<std::string> kept;
  bool prev_blank = true;
  for (auto& line : lines) {
    std::string t = text::trim(line);
    if (t.empty()) {
      if (!prev_blank) kept.push_back("");
      prev_blank = true;
    } else {
      kept.push_back(t);
      prev_blank = false;
    }
  }
  while (!kept.empty() && kept.back().empty()) kept.pop_back();
  return text::join(kept, "\n");
}

Mailbox parse_mailbox(std::string_view field) {
  Mailbox box;
  std::string s;
  {
    /* drop (comments) outside quoted strings */
    bool quoted = false;
    int depth = 0;
    for (char c : field) {
      if (c == '"' && depth == 0) quoted = !quoted;
      if (!quoted && c == '(') { ++depth; continue; }
      if (!quoted && c == ')' && depth > 0) { --depth; continue; }
      if (depth == 0) s.push_back(c);
    }
  }
  std::size_t comma = std::string::npos;
  {
    bool quoted = false;
    bool in_angle = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      else if (!quoted && s[i] == '<') in_angle = true;
      else if (!quoted && s[i] == '>') in_angle = false;
      else if (!quoted && !in_angle && s[i] == ',') { comma = i; break; }
    }
  }
  if (comma != std::string::npos) s = s.substr(0, comma);
  std::size_t lt = s.find('<');
  std::size_t gt = s.find('>', lt == std::string::npos ? 0 : lt);
  if (lt != std::string::npos && gt != std::string::npos && gt > lt) {
    box.address = text::trim(s.substr(lt + 1, gt - lt - 1));
    std::string display = text::trim(s.substr(0, lt));
    if (display.size() >= 2 && display.front() == '"' && display.back() == '"')
      display = display.substr(1, display.size() - 2);
    box.display_name = decode_header_value(text::trim(display));
  } else {
    box.address = text::trim(s);
  }
  /* a bare display string with no @ is not an address */
  if (box.address.find('@') == std::string::npos && lt == std::string::npos) {
    box.display_name = decode_header_value(box.address);
    box.address.clear();
  }
  return box;
}

AuthResults parse_auth_results(const std::vector<HeaderField>& headers,
                               std::vector<std::string>* diagnostics) {
  AuthResults out;
  bool spf_set = false, dkim_set = false, dmarc_set = false;
  auto apply = [&](std::string_view mech, std::string_view token, bool* already) {
    if (*already) return;
    *already = true;
    std::string t = text::to_lower(std::string(token));
    AuthVerdict v;
    if (t == "pass") v = AuthVerdict::Pass;
    else if (t == "fail") v = AuthVerdict::Fail;
    else if (t == "none") v = AuthVerdict::None;
    else {
      v = AuthVerdict::None;
      if (diagnostics)
        diagnostics->push_back("unrecognized " + std::string(mech) + " verdict '" + t +
                               "' treated as none");
    }
    if (mech == "spf") out.spf = v;
    else if (mech == "dkim") out.dkim = v;
    else out.dmarc = v;
  };
  for (const auto& h : headers) {
    if (!text::iequals(h.name, "Authentication-Results")) continue;
    std::string low = text::to_lower(h.value);
    for (std::string_view mech : {"spf", "dkim", "dmarc"}) {
      bool* flag = mech == "spf" ? &spf_set : mech == "dkim" ? &dkim_set : &dmarc_set;
      if (*flag) continue;
      std::size_t pos = 0;
      while (pos < low.size()) {
        std::size_t hit = low.find(std::string(mech) + "=", pos);
        if (hit == std::string::npos) break;
        bool left_ok = hit == 0 || !std::isalnum(static_cast<unsigned char>(low[hit - 1]));
        if (!left_ok) {
          pos = hit + mech.size() + 1;
          continue;
        }
        std::size_t vstart = hit + mech.size() + 1;
        std::size_t vend = vstart;
        while (vend < low.size() &&
               (std::isalnum(static_cast<unsigned char>(low[vend])) || low[vend] == '-' ||
                low[vend] == '_'))
          ++vend;
        apply(mech, std::string_view(low).substr(vstart, vend - vstart), flag);
        break;
      }
    }
  }
  return out;
}

ParsedEmail parse_eml(const RawEmail& raw) {
  require(!raw.bytes.empty(), Errc::UnparseableMessage, "empty message " + raw.source_id);
  ParsedEmail email;
  email.source_id = raw.source_id;
  email.label = raw.label;

  HeaderBlock block = split_headers(raw.bytes, &email.diagnostics);
  if (block.fields.empty()) {
    raise(Errc::UnparseableMessage, "no header block in " + raw.source_id);
  }
  email.headers = block.fields;
  if (!block.found_separator)
    email.diagnostics.push_back("no blank line after headers, body assumed empty");

  BodyParts parts;
  walk_part(raw.bytes, 0, &parts, &email.diagnostics);
  email.body_text = normalize_newlines(text::join(parts.plain, "\n"));
  email.body_html = normalize_newlines(text::join(parts.html, "\n"));
  if (email.body_text.empty() && !email.body_html.empty())
    email.body_text = html_to_text(email.body_html);

  if (auto subject = email.header("Subject")) email.subject = decode_header_value(*subject);
  if (auto from = email.header("From")) {
    Mailbox m = parse_mailbox(*from);
    if (!m.address.empty() || !m.display_name.empty()) email.from = m;
  }
  if (auto rt = email.header("Reply-To")) {
    Mailbox m = parse_mailbox(*rt);
    if (!m.address.empty()) email.reply_to = m;
  }
  if (auto rp = email.header("Return-Path")) {
    Mailbox m = parse_mailbox(*rp);
    if (!m.address.empty()) email.return_path = m;
  }
  email.received_chain = email.header_all("Received");
  email.auth = parse_auth_results(email.headers, &email.diagnostics);
  email.urls = extract_urls(email);
  return email;
}

}  // namespace phishguard::email
