#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "phishguard/email/corpus.hpp"
#include "phishguard/email/features.hpp"
#include "phishguard/email/homoglyph.hpp"
#include "phishguard/email/parser.hpp"
#include "phishguard/email/urls.hpp"
#include "phishguard/errors.hpp"

using namespace phishguard;
using namespace phishguard::email;

namespace {

RawEmail raw_from(std::string bytes, std::string id = "test") {
  RawEmail raw;
  raw.source_id = std::move(id);
  raw.bytes = std::move(bytes);
  return raw;
}

std::string fixture_path(const char* name) {
  return std::string(PHISHGUARD_FIXTURE_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("plain message parses headers, body, sender") {
  auto parsed = parse_eml(raw_from(
      "From: \"Support\" <help@example.com>\r\n"
      "To: user@client.org\r\n"
      "Subject: Hello\r\n"
      "Reply-To: <other@elsewhere.net>\r\n"
      "\r\n"
      "Line one.\r\nLine two.\r\n"));
  CHECK(parsed.subject == "Hello");
  REQUIRE(parsed.from.has_value());
  CHECK(parsed.from->address == "help@example.com");
  CHECK(parsed.from->display_name == "Support");
  CHECK(parsed.from->host() == "example.com");
  REQUIRE(parsed.reply_to.has_value());
  CHECK(parsed.reply_to->host() == "elsewhere.net");
  CHECK(parsed.body_text == "Line one.\nLine two.\n");
  CHECK(parsed.auth.spf == AuthVerdict::Missing);
}

TEST_CASE("folded headers unfold") {
  auto parsed = parse_eml(raw_from(
      "Subject: a very\r\n"
      "  long subject\r\n"
      "From: a@b.c\r\n"
      "\r\n"
      "body\r\n"));
  CHECK(parsed.subject == "a very long subject");
}

TEST_CASE("empty and headerless input is unparseable") {
  CHECK_THROWS_AS(parse_eml(raw_from("")), Error);
  try {
    parse_eml(raw_from("no colon here\njust words\n"));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnparseableMessage);
  }
}

TEST_CASE("quoted-printable body decodes") {
  auto parsed = parse_eml(raw_from(
      "From: a@b.c\r\n"
      "Subject: qp\r\n"
      "Content-Type: text/plain; charset=utf-8\r\n"
      "Content-Transfer-Encoding: quoted-printable\r\n"
      "\r\n"
      "Caf=C3=A9 line=\r\n"
      " continues=2E\r\n"));
  CHECK(parsed.body_text.find("Caf\xC3\xA9 line continues.") != std::string::npos);
}

TEST_CASE("base64 body decodes") {
  auto parsed = parse_eml(raw_from(
      "From: a@b.c\r\n"
      "Content-Transfer-Encoding: base64\r\n"
      "Content-Type: text/plain\r\n"
      "\r\n"
      "SGVsbG8gd29y\r\nbGQh\r\n"));
  CHECK(parsed.body_text == "Hello world!");
}

TEST_CASE("multipart prefers text/plain and keeps html") {
  auto parsed = parse_eml(raw_from(
      "From: a@b.c\r\n"
      "Subject: mp\r\n"
      "MIME-Version: 1.0\r\n"
      "Content-Type: multipart/alternative; boundary=\"XYZ\"\r\n"
      "\r\n"
      "preamble\r\n"
      "--XYZ\r\n"
      "Content-Type: text/plain; charset=utf-8\r\n"
      "\r\n"
      "plain body with http://example.com/a\r\n"
      "--XYZ\r\n"
      "Content-Type: text/html; charset=utf-8\r\n"
      "\r\n"
      "<html><body><a href=\"http://example.com/b\">click</a></body></html>\r\n"
      "--XYZ--\r\n"
      "trailer\r\n"));
  CHECK(parsed.body_text.find("plain body") != std::string::npos);
  CHECK(parsed.body_text.find("preamble") == std::string::npos);
  CHECK(parsed.body_html.find("<a href") != std::string::npos);
  REQUIRE(parsed.urls.size() == 2);
  CHECK(parsed.urls[0].raw == "http://example.com/a");
  CHECK(parsed.urls[1].raw == "http://example.com/b");
  CHECK(parsed.urls[1].display_text == "click");
}

TEST_CASE("html-only message falls back to stripped text") {
  auto parsed = parse_eml(raw_from(
      "From: a@b.c\r\n"
      "Content-Type: text/html\r\n"
      "\r\n"
      "<p>Dear &quot;user&quot;,</p><p>verify &amp; update</p>"
      "<style>p { color: red }</style>\r\n"));
  CHECK(parsed.body_text.find("Dear \"user\",") != std::string::npos);
  CHECK(parsed.body_text.find("verify & update") != std::string::npos);
  CHECK(parsed.body_text.find("color") == std::string::npos);
}

TEST_CASE("rfc2047 subject decodes") {
  auto parsed = parse_eml(raw_from(
      "From: a@b.c\r\n"
      "Subject: =?UTF-8?B?UMSZa25l?= and =?utf-8?Q?more_text?=\r\n"
      "\r\n"
      "x\r\n"));
  CHECK(parsed.subject == "P\xC4\x99kne and more text");
}

TEST_CASE("authentication results parse with first-wins and downgrades") {
  std::vector<HeaderField> headers{
      {"Authentication-Results", "mx.example.com; spf=pass smtp.mailfrom=a@b.c; dkim=softfail; dmarc=fail"},
      {"Authentication-Results", "other; spf=fail; dkim=pass"},
  };
  std::vector<std::string> diags;
  AuthResults auth = parse_auth_results(headers, &diags);
  CHECK(auth.spf == AuthVerdict::Pass);
  CHECK(auth.dkim == AuthVerdict::None);  // softfail downgrades
  CHECK(auth.dmarc == AuthVerdict::Fail);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].find("softfail") != std::string::npos);
  CHECK(auth_code(auth.spf) == 1);
  CHECK(auth_code(auth.dkim) == 0);
  CHECK(auth_code(auth.dmarc) == -1);
}

TEST_CASE("missing auth header leaves all mechanisms missing") {
  AuthResults auth = parse_auth_results({{"Subject", "x"}}, nullptr);
  CHECK(auth.spf == AuthVerdict::Missing);
  CHECK(auth.dkim == AuthVerdict::Missing);
  CHECK(auth.dmarc == AuthVerdict::Missing);
  CHECK(auth_code(AuthVerdict::Missing) == 0);
}

TEST_CASE("url extraction covers bare scheme, trailing punctuation, dedup") {
  ParsedEmail mail;
  mail.body_text =
      "Go to https://pay.example.com/login?x=1, or https:bare.example.net/path#f.\n"
      "Again https://pay.example.com/login?x=1 and ftp://files.example.org/a.";
  auto urls = extract_urls(mail);
  REQUIRE(urls.size() == 3);
  CHECK(urls[0].raw == "https://pay.example.com/login?x=1");
  CHECK(urls[0].host == "pay.example.com");
  CHECK(urls[0].path_length == 6);  // "/login"
  CHECK(urls[1].raw == "https:bare.example.net/path#f");
  CHECK(urls[1].host == "bare.example.net");
  CHECK(urls[2].host == "files.example.org");
}

TEST_CASE("url host parsing handles userinfo, port, ip") {
  CHECK(url_host("http://user:pw@evil.example.com:8080/x") == "evil.example.com");
  CHECK(url_host("http://192.168.10.1/admin") == "192.168.10.1");
  UrlRecord rec = make_url_record("http://192.168.10.1/admin", "");
  CHECK(rec.is_ip_host);
  UrlRecord rec2 = make_url_record("https://example.com", "");
  CHECK(rec2.path_length == 0);
  CHECK_FALSE(rec2.is_ip_host);
}

TEST_CASE("homoglyph skeleton and suspect detection") {
  const auto& table = ConfusableTable::builtin();
  std::string spoofed = "p\xD0\xB0yp\xD0\xB0l.com";  // cyrillic a twice
  CHECK(table.skeleton(spoofed) == "paypal.com");
  CHECK(homoglyph_suspect(spoofed));
  CHECK_FALSE(homoglyph_suspect("paypal.com"));
  CHECK_FALSE(homoglyph_suspect("caf\xC3\xA9.example"));  // accented char is not a lookalike
  UrlRecord rec = make_url_record("https://p\xD0\xB0ypal.com/verify", "");
  CHECK(rec.homoglyph_suspect);
}

TEST_CASE("confusable table round trips through its file format") {
  auto table = ConfusableTable::from_string("# comment\n\xD0\xB0\ta\n\xCE\xBF\to\n");
  CHECK(table.size() == 2);
  CHECK(table.skeleton(std::string("\xD0\xB0")) == "a");
  auto back = table.lookalike_for(U'a');
  REQUIRE(back.has_value());
  CHECK(*back == U'\x0430');
}

TEST_CASE("password validation fixture parses end to end") {
  RawEmail raw;
  raw.source_id = "password_validation.eml";
  raw.bytes = slurp(fixture_path("password_validation.eml"));
  auto parsed = parse_eml(raw);
  CHECK(parsed.subject == "Important Password Validation");
  REQUIRE(parsed.from.has_value());
  CHECK(parsed.from->host() == "creditloiuse.com");
  CHECK(parsed.from->display_name == "Monkey Support Notification");
  REQUIRE(parsed.urls.size() == 1);
  CHECK(parsed.urls[0].host.ends_with("ipfs.dweb.link"));
  CHECK(parsed.auth.spf == AuthVerdict::Missing);
  CHECK(parsed.auth.dkim == AuthVerdict::Missing);
  CHECK(parsed.auth.dmarc == AuthVerdict::Missing);

  auto features = extract_features(parsed);
  CHECK(features.url_count == 1);
  CHECK(features.keyword_hits >= 3);  // password x2, update x2, account
  CHECK(features.spf_code == 0);
}

TEST_CASE("lexicon loads, counts hits in subject and body") {
  auto lex = Lexicon::from_string("# v1\nverify\nAccount\n");
  CHECK(lex.size() == 2);
  CHECK(lex.contains("ACCOUNT"));
  ParsedEmail mail;
  mail.subject = "Verify now";
  mail.body_text = "your account. Account again; verified is not a hit";
  CHECK(count_keyword_hits(mail.subject + "\n" + mail.body_text, lex) == 3);
  auto features = extract_features(mail, lex, ReputationTable());
  CHECK(features.keyword_hits == 3);
}

TEST_CASE("reputation table scores hosts") {
  auto table = ReputationTable::from_string("example.com\t0.8\nbad.example\t-1\n");
  CHECK(table.score("EXAMPLE.com") == doctest::Approx(0.8));
  CHECK(table.score("bad.example") == doctest::Approx(-1.0));
  CHECK(table.score("unknown.org") == doctest::Approx(0.0));
  CHECK_THROWS_AS(ReputationTable::from_string("x.com\t2.0\n"), Error);
  CHECK_THROWS_AS(ReputationTable::from_string("x.com 0.5\n"), Error);
}

TEST_CASE("eml directory corpus loads sorted with dir labels") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "pg_corpus_test";
  fs::remove_all(dir);
  fs::create_directories(dir / "phishing");
  fs::create_directories(dir / "ham");
  auto write = [](const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    out << "From: a@b.c\nSubject: s\n\n" << body;
  };
  write(dir / "phishing" / "b.eml", "two");
  write(dir / "phishing" / "a.eml", "one");
  write(dir / "ham" / "c.eml", "three");
  auto corpus = load_corpus(dir, CorpusFormat::EmlDir);
  REQUIRE(corpus.size() == 3);
  CHECK(corpus[0].source_id == "ham/c.eml");
  CHECK(corpus[0].label == CorpusLabel::Legitimate);
  CHECK(corpus[1].source_id == "phishing/a.eml");
  CHECK(corpus[1].label == CorpusLabel::Phishing);
  CHECK(corpus[2].source_id == "phishing/b.eml");
  fs::remove_all(dir);
}

TEST_CASE("mbox corpus splits on From lines") {
  namespace fs = std::filesystem;
  fs::path file = fs::temp_directory_path() / "pg_test.mbox";
  {
    std::ofstream out(file, std::ios::binary);
    out << "From alice Mon Jan  1 00:00:00 2024\n"
           "From: a@b.c\nSubject: first\n\nbody one\n>From escaped line\n"
           "\n"
           "From bob Mon Jan  1 00:00:01 2024\n"
           "From: d@e.f\nSubject: second\n\nbody two\n";
  }
  auto corpus = load_corpus(file, CorpusFormat::Mbox,
                            {.label_override = CorpusLabel::Legitimate});
  REQUIRE(corpus.size() == 2);
  auto first = parse_eml(corpus[0]);
  CHECK(first.subject == "first");
  CHECK(first.body_text.find("From escaped line") != std::string::npos);
  auto second = parse_eml(corpus[1]);
  CHECK(second.subject == "second");
  CHECK(corpus[0].label == CorpusLabel::Legitimate);
  fs::remove(file);
}

TEST_CASE("csv corpus maps columns and labels") {
  namespace fs = std::filesystem;
  fs::path file = fs::temp_directory_path() / "pg_test.csv";
  {
    std::ofstream out(file, std::ios::binary);
    out << "subject,body,sender,label\n"
           "\"Hi, there\",\"Line one\nLine two\",alice@example.com,legitimate\n"
           "Urgent,\"Verify your \"\"account\"\" now\",bad@evil.example,phishing\n";
  }
  auto corpus = load_corpus(file, CorpusFormat::Csv);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].label == CorpusLabel::Legitimate);
  CHECK(corpus[1].label == CorpusLabel::Phishing);
  auto parsed = parse_eml(corpus[1]);
  CHECK(parsed.subject == "Urgent");
  CHECK(parsed.body_text.find("\"account\"") != std::string::npos);
  REQUIRE(parsed.from.has_value());
  CHECK(parsed.from->host() == "evil.example");

  std::ofstream(file, std::ios::binary) << "a,b\n1,2\n";
  CHECK_THROWS_AS(load_corpus(file, CorpusFormat::Csv), Error);
  fs::remove(file);
}

TEST_CASE("missing corpus path raises io failure") {
  try {
    load_corpus("/nonexistent/path/zz", CorpusFormat::Auto);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IoFailure);
  }
}
