#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "phishguard/adversarial/loop.hpp"
#include "phishguard/adversarial/transforms.hpp"
#include "phishguard/adversarial/variant.hpp"
#include "phishguard/agents/mock_backend.hpp"
#include "phishguard/agents/prompts.hpp"
#include "phishguard/email/homoglyph.hpp"
#include "phishguard/errors.hpp"
#include "support/synth.hpp"

using namespace phishguard;
using namespace phishguard::adversarial;

namespace {

email::ParsedEmail parse_text(const std::string& bytes, email::CorpusLabel label,
                              const std::string& id = "src-1") {
  email::RawEmail raw;
  raw.source_id = id;
  raw.bytes = bytes;
  raw.label = label;
  return email::parse_eml(raw);
}

const char* kSamplePhish =
    "From: alerts@secure-mail.example\n"
    "To: customer@client.example\n"
    "Content-Type: text/plain; charset=utf-8\n"
    "Subject: Verify your account\n"
    "\n"
    "Please verify your account and update your password.\n"
    "Sign in at http://login.paypal.example/session\n";

email::ParsedEmail sample_phish() {
  return parse_text(kSamplePhish, email::CorpusLabel::Phishing);
}

bool in_pool(const std::string& body, const std::vector<std::string>& pool) {
  for (const std::string& sentence : pool) {
    if (body.find(sentence) != std::string::npos) return true;
  }
  return false;
}

class CannedBackend : public agents::ChatBackend {
public:
  explicit CannedBackend(std::string reply) : reply_(std::move(reply)) {}

  std::string complete(const std::vector<agents::ChatMessage>& messages) override {
    last_messages = messages;
    return reply_;
  }

  const agents::ChatBackendConfig& config() const override { return config_; }

  std::vector<agents::ChatMessage> last_messages;

private:
  std::string reply_;
  agents::ChatBackendConfig config_;
};

}  // namespace

TEST_CASE("synonym substitution maps the seeded pairs") {
  const auto& table = SynonymTable::builtin();
  TransformResult r = synonym_substitute("please verify your account now", table, 1);
  CHECK(r.text == "please confirm your profile now");
  CHECK(r.replacements == 2);

  r = synonym_substitute("Verify this URGENT request", table, 1);
  CHECK(r.text.find("Confirm") != std::string::npos);
  CHECK(r.text.find("URGENT") == std::string::npos);
}

TEST_CASE("synonym substitution never cascades into its own output") {
  /* verify -> confirm, confirm -> validate: one pass must stop at confirm */
  const auto& table = SynonymTable::builtin();
  TransformResult r = synonym_substitute("verify", table, 3);
  CHECK(r.text == "confirm");
  CHECK(r.replacements == 1);
}

TEST_CASE("synonym substitution leaves keyword-free text alone") {
  const auto& table = SynonymTable::builtin();
  TransformResult r = synonym_substitute("the quarterly meeting moved to thursday", table, 9);
  CHECK(r.text == "the quarterly meeting moved to thursday");
  CHECK(r.replacements == 0);
}

TEST_CASE("synonym substitution matches whole words only") {
  const auto& table = SynonymTable::builtin();
  TransformResult r = synonym_substitute("the accountant verified nothing", table, 2);
  CHECK(r.text == "the accountant verified nothing");
  CHECK(r.replacements == 0);
}

TEST_CASE("synonym table parses the tab format") {
  SynonymTable table = SynonymTable::from_string(
      "# comment line\n"
      "alpha\tbeta\tgamma\n"
      "\n"
      "delta\tepsilon\n");
  REQUIRE(table.size() == 2);
  CHECK(table.entries()[0].first == "alpha");
  CHECK(table.entries()[0].second.size() == 2);
  CHECK(table.entries()[1].second[0] == "epsilon");
}

TEST_CASE("homoglyph replacement keeps the skeleton while changing codepoints") {
  std::string input = "visit http://paypal.com/login today";
  TransformResult r = homoglyph_replace(input, 0.6, 11);
  CHECK(r.replacements > 0);
  CHECK(r.text != input);
  const auto& table = email::ConfusableTable::builtin();
  CHECK(table.skeleton(r.text) == table.skeleton(input));
}

TEST_CASE("homoglyph replacement is deterministic per seed") {
  std::string input = "your amazon parcel: http://amazon-help.example/track";
  TransformResult a = homoglyph_replace(input, 0.5, 21);
  TransformResult b = homoglyph_replace(input, 0.5, 21);
  TransformResult c = homoglyph_replace(input, 0.5, 22);
  CHECK(a.text == b.text);
  CHECK(a.replacements == b.replacements);
  CHECK(a.text != c.text);
}

TEST_CASE("homoglyph replacement skips text without hosts or brand tokens") {
  std::string input = "lunch is at noon, bring the slides";
  TransformResult r = homoglyph_replace(input, 0.9, 5);
  CHECK(r.text == input);
  CHECK(r.replacements == 0);

  std::string numeric = "ping http://192.168.0.1/status for details";
  r = homoglyph_replace(numeric, 0.9, 5);
  CHECK(r.text == numeric);
  CHECK(r.replacements == 0);
}

TEST_CASE("homoglyph replacement at zero intensity is the identity") {
  std::string input = "see http://paypal.com/a";
  TransformResult r = homoglyph_replace(input, 0.0, 7);
  CHECK(r.text == input);
  CHECK(r.replacements == 0);
}

TEST_CASE("neutral sentence insertion lands after the first paragraph") {
  std::string input = "Dear customer,\n\nYour parcel shipped.\n";
  TransformResult r = insert_neutral_sentence(input, 4);
  CHECK(r.replacements == 1);
  CHECK(in_pool(r.text, neutral_sentence_pool()));
  CHECK(r.text.find("Dear customer,") == 0);
  CHECK(r.text.find("Your parcel shipped.") != std::string::npos);
  std::size_t para = r.text.find("\n\n");
  REQUIRE(para != std::string::npos);
  bool sentence_before_rest = false;
  for (const std::string& sentence : neutral_sentence_pool()) {
    std::size_t at = r.text.find(sentence);
    if (at != std::string::npos && at < r.text.find("Your parcel shipped.")) {
      sentence_before_rest = true;
    }
  }
  CHECK(sentence_before_rest);
}

TEST_CASE("neutral sentence insertion appends when there is one paragraph") {
  TransformResult r = insert_neutral_sentence("single line", 8);
  CHECK(r.replacements == 1);
  CHECK(r.text.find("single line\n") == 0);
  CHECK(in_pool(r.text, neutral_sentence_pool()));
  CHECK(in_pool("We hope this email serves you well.", neutral_sentence_pool()));
}

TEST_CASE("transform kind names round trip") {
  for (TransformKind kind : {TransformKind::SynonymSub, TransformKind::SentenceRewrite,
                             TransformKind::ContentMod, TransformKind::Homoglyph,
                             TransformKind::Polymorphic}) {
    CHECK(transform_kind_from_string(to_string(kind)) == kind);
  }
  CHECK(to_string(TransformKind::SynonymSub) == "synonym_substitution");
  CHECK(to_string(TransformKind::Homoglyph) == "homoglyph_replacement");
  CHECK_THROWS_WITH_AS(transform_kind_from_string("typo_injection"),
                       doctest::Contains("unknown transform kind"), Error);
}

TEST_CASE("rule variant applies the requested transforms and records them") {
  email::ParsedEmail mail = sample_phish();
  AdversarialVariant v =
      rule_based_variant(mail, {TransformKind::SynonymSub, TransformKind::Homoglyph}, 31);
  CHECK(v.source_id == mail.source_id);
  CHECK(v.intended_label == email::CorpusLabel::Phishing);
  CHECK(v.generator == Generator::RuleBased);
  CHECK(v.text != kSamplePhish);
  CHECK_FALSE(v.text.empty());
  REQUIRE(v.transforms.size() == 2);
  CHECK(v.transforms[0] == TransformKind::SynonymSub);
  CHECK(v.transforms[1] == TransformKind::Homoglyph);
  CHECK(v.text.find("confirm your profile") != std::string::npos);
}

TEST_CASE("rule variant with only homoglyphs keeps the body skeleton") {
  email::ParsedEmail mail = sample_phish();
  AdversarialVariant v = rule_based_variant(mail, {TransformKind::Homoglyph}, 17);
  REQUIRE(v.transforms == std::vector<TransformKind>{TransformKind::Homoglyph});
  email::ParsedEmail again = parse_variant(v);
  const auto& table = email::ConfusableTable::builtin();
  CHECK(again.body_text != mail.body_text);
  CHECK(table.skeleton(again.body_text) == table.skeleton(mail.body_text));
}

TEST_CASE("rule variant content modification inserts a pool sentence") {
  email::ParsedEmail mail = sample_phish();
  AdversarialVariant v = rule_based_variant(mail, {TransformKind::ContentMod}, 12);
  REQUIRE(v.transforms == std::vector<TransformKind>{TransformKind::ContentMod});
  CHECK(in_pool(v.text, neutral_sentence_pool()));
}

TEST_CASE("rule variant is deterministic per seed") {
  email::ParsedEmail mail = sample_phish();
  std::set<TransformKind> kinds{TransformKind::SynonymSub, TransformKind::ContentMod,
                                TransformKind::Homoglyph};
  AdversarialVariant a = rule_based_variant(mail, kinds, 77);
  AdversarialVariant b = rule_based_variant(mail, kinds, 77);
  AdversarialVariant c = rule_based_variant(mail, kinds, 78);
  CHECK(a.text == b.text);
  CHECK(a.variant_id == b.variant_id);
  CHECK(a.text != c.text);
}

TEST_CASE("rule variant falls back to an insertion when nothing changes") {
  std::string source = "From: colleague@corp.example\nSubject: minutes\n\nsee you thursday.\n";
  email::ParsedEmail mail = parse_text(source, email::CorpusLabel::Legitimate);
  AdversarialVariant v = rule_based_variant(mail, {TransformKind::SynonymSub}, 41);
  REQUIRE(v.transforms == std::vector<TransformKind>{TransformKind::ContentMod});
  CHECK(v.text != source);
  CHECK(v.text.find("see you thursday.") != std::string::npos);
  CHECK(in_pool(v.text, neutral_sentence_pool()));
}

TEST_CASE("rule variant rejects unsupported kinds and unlabeled sources") {
  email::ParsedEmail mail = sample_phish();
  CHECK_THROWS_WITH_AS(rule_based_variant(mail, {TransformKind::SentenceRewrite}, 1),
                       doctest::Contains("unsupported transform kind"), Error);
  email::ParsedEmail unlabeled = parse_text("Subject: x\n\nbody\n", email::CorpusLabel::Unlabeled);
  CHECK_THROWS_WITH_AS(rule_based_variant(unlabeled, {TransformKind::ContentMod}, 1),
                       doctest::Contains("must be labeled"), Error);
}

TEST_CASE("rule variant rebuilds headers without MIME framing") {
  email::ParsedEmail mail = sample_phish();
  AdversarialVariant v = rule_based_variant(mail, {TransformKind::SynonymSub}, 13);
  CHECK(v.text.find("From: alerts@secure-mail.example") != std::string::npos);
  CHECK(v.text.find("To: customer@client.example") != std::string::npos);
  CHECK(v.text.find("Content-Type") == std::string::npos);
  CHECK(v.text.find("Subject: Confirm your profile") != std::string::npos);

  email::ParsedEmail again = parse_variant(v);
  CHECK(again.subject == "Confirm your profile");
  CHECK(again.label == email::CorpusLabel::Phishing);
  CHECK(again.source_id == v.variant_id);
}

TEST_CASE("llm variant takes the mock rewrite and differs from the source") {
  agents::MockBackend backend;
  email::ParsedEmail mail = sample_phish();
  AdversarialVariant v = generate_llm_variant(backend, mail, mail.label);
  CHECK(v.generator == Generator::Llm);
  CHECK(v.intended_label == email::CorpusLabel::Phishing);
  CHECK_FALSE(v.text.empty());
  CHECK(v.text != kSamplePhish);
  CHECK(v.variant_id == mail.source_id + "#llm");

  AdversarialVariant again = generate_llm_variant(backend, mail, mail.label);
  CHECK(again.text == v.text);

  /* label picks the instruction branch; the mock transform itself only reads
     the email payload, so just the intended label changes */
  AdversarialVariant legit = generate_llm_variant(backend, mail, email::CorpusLabel::Legitimate);
  CHECK(legit.intended_label == email::CorpusLabel::Legitimate);
  CHECK_FALSE(legit.text.empty());
}

TEST_CASE("llm variant propagates emphasis into the system prompt") {
  CannedBackend backend("Subject: rewritten\n\nnew body\n");
  email::ParsedEmail mail = sample_phish();
  generate_llm_variant(backend, mail, mail.label, "Emphasis: push homoglyph_replacement further.");
  REQUIRE_FALSE(backend.last_messages.empty());
  CHECK(backend.last_messages[0].role == "system");
  CHECK(backend.last_messages[0].content.find(
            "Emphasis: push homoglyph_replacement further.") != std::string::npos);

  CannedBackend plain("Subject: rewritten\n\nnew body\n");
  generate_llm_variant(plain, mail, mail.label);
  CHECK(plain.last_messages[0].content.find("Emphasis") == std::string::npos);
}

TEST_CASE("llm variant rejects a blank reply") {
  CannedBackend backend("   \n  ");
  email::ParsedEmail mail = sample_phish();
  CHECK_THROWS_AS(generate_llm_variant(backend, mail, mail.label), Error);
  try {
    generate_llm_variant(backend, mail, mail.label);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyVariant);
  }
}

TEST_CASE("parse_variant synthesizes headers for body-only replies") {
  AdversarialVariant v;
  v.variant_id = "src-9#llm";
  v.source_id = "src-9";
  v.intended_label = email::CorpusLabel::Legitimate;
  v.generator = Generator::Llm;
  v.text = "just a rewritten body with no header block at all";
  email::ParsedEmail mail = parse_variant(v);
  CHECK(mail.source_id == "src-9#llm");
  CHECK(mail.label == email::CorpusLabel::Legitimate);
  CHECK(mail.body_text.find("rewritten body") != std::string::npos);
}

namespace {

std::vector<email::ParsedEmail> loop_corpus() {
  num::RngStream noise(2024);
  std::vector<email::ParsedEmail> corpus;
  for (int i = 0; i < 200; ++i) {
    bool phishing = i % 2 == 0;
    bool meta_bad = phishing && noise.uniform() < 0.5;
    corpus.push_back(email::parse_eml(testsupport::make_loop_email(phishing, meta_bad, i)));
  }
  return corpus;
}

std::size_t count_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("adversarial loop rejects bad arguments") {
  agents::MockBackend backend;
  std::vector<email::ParsedEmail> corpus = {sample_phish()};
  fusion::PolicyParams params = fusion::init_params(1);
  LoopConfig cfg;
  CHECK_THROWS_WITH_AS(adversarial_loop(corpus, backend, params, 0, cfg),
                       doctest::Contains("rounds"), Error);
  std::vector<email::ParsedEmail> empty;
  CHECK_THROWS_AS(adversarial_loop(empty, backend, params, 1, cfg), Error);
  LoopConfig bad = cfg;
  bad.sample_fraction = 0.0;
  CHECK_THROWS_AS(adversarial_loop(corpus, backend, params, 1, bad), Error);
}

TEST_CASE("adversarial loop adapts to evaders over two rounds") {
  auto corpus = loop_corpus();
  agents::MockBackend backend;

  fusion::TrainOptions pre;
  pre.ppo.seed = 11;
  pre.passes = 6;
  fusion::TrainResult pretrained = fusion::train(corpus, backend, pre);

  std::filesystem::path run_dir =
      std::filesystem::temp_directory_path() / "pg_loop_test";
  std::filesystem::remove_all(run_dir);

  LoopConfig cfg;
  cfg.seed = 11;
  cfg.retrain.ppo.seed = 11;
  cfg.retrain.passes = 6;
  cfg.run_dir = run_dir;
  LoopResult result = adversarial_loop(corpus, backend, pretrained.params, 2, cfg);

  REQUIRE(result.rounds.size() == 2);
  const RoundReport& r1 = result.rounds[0];
  const RoundReport& r2 = result.rounds[1];
  CHECK(r1.variants == 100);
  CHECK(r1.evasion_rate == doctest::Approx(0.5));
  CHECK(r1.admitted == 40);  /* capped at 20% of 200 */
  CHECK(r2.evasion_rate == doctest::Approx(0.0));
  CHECK(r2.evasion_rate <= r1.evasion_rate);
  CHECK(r2.admitted == 0);

  CHECK(result.pool.size() == corpus.size() + r1.admitted + r2.admitted);
  CHECK(result.generated_ids.size() == r1.admitted + r2.admitted);

  /* admitted variants keep their source's label and are marked by id */
  std::set<std::string> generated(result.generated_ids.begin(), result.generated_ids.end());
  std::size_t found = 0;
  for (const auto& mail : result.pool) {
    CHECK(mail.label != email::CorpusLabel::Unlabeled);
    if (generated.count(mail.source_id) != 0) {
      ++found;
      CHECK(mail.label == email::CorpusLabel::Legitimate);  /* only legit variants evaded */
    }
  }
  CHECK(found == result.generated_ids.size());

  /* run_dir layout: one variants + feedback JSONL pair per round */
  for (int round = 1; round <= 2; ++round) {
    auto dir = run_dir / ("round_" + std::to_string(round));
    CHECK(std::filesystem::exists(dir / "variants.jsonl"));
    CHECK(std::filesystem::exists(dir / "feedback.jsonl"));
    CHECK(count_lines(dir / "variants.jsonl") == 100);
    CHECK(count_lines(dir / "feedback.jsonl") == 100);
  }

  std::ifstream in(run_dir / "round_1" / "variants.jsonl");
  std::string first_line;
  REQUIRE(std::getline(in, first_line));
  auto row = nlohmann::json::parse(first_line);
  CHECK(row.at("generated").get<bool>());
  CHECK(row.contains("variant_id"));
  CHECK(row.contains("source_id"));
  CHECK(row.contains("intended_label"));
  CHECK(row.contains("transforms"));
  CHECK(row.at("generator").get<std::string>() == "rule_based");

  std::filesystem::remove_all(run_dir);
}

TEST_CASE("adversarial loop is deterministic for a fixed seed") {
  auto corpus = loop_corpus();
  agents::MockBackend backend;
  fusion::TrainOptions pre;
  pre.ppo.seed = 11;
  pre.passes = 6;
  fusion::TrainResult pretrained = fusion::train(corpus, backend, pre);

  LoopConfig cfg;
  cfg.seed = 11;
  cfg.retrain.ppo.seed = 11;
  cfg.retrain.passes = 6;
  LoopResult a = adversarial_loop(corpus, backend, pretrained.params, 2, cfg);
  LoopResult b = adversarial_loop(corpus, backend, pretrained.params, 2, cfg);
  CHECK(a.generated_ids == b.generated_ids);
  CHECK(fusion::flatten(a.params) == fusion::flatten(b.params));
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    CHECK(a.rounds[i].evaded == b.rounds[i].evaded);
    CHECK(a.rounds[i].admitted == b.rounds[i].admitted);
  }
}

TEST_CASE("adversarial loop leaves the pool alone when nothing evades") {
  /* keyword-hot phishing with broken auth: every variant keeps enough signal
     that even a fresh policy flags it, so nothing is admitted */
  num::RngStream noise(99);
  std::vector<email::ParsedEmail> corpus;
  for (int i = 0; i < 40; ++i) {
    corpus.push_back(email::parse_eml(testsupport::make_loop_email(true, true, i)));
  }
  agents::MockBackend backend;
  fusion::PolicyParams params = fusion::init_params(5);

  LoopConfig cfg;
  cfg.seed = 5;
  cfg.retrain.passes = 1;
  LoopResult result = adversarial_loop(corpus, backend, params, 1, cfg);
  REQUIRE(result.rounds.size() == 1);
  CHECK(result.rounds[0].evaded == 0);
  CHECK(result.rounds[0].admitted == 0);
  CHECK(result.pool.size() == corpus.size());
  CHECK(result.generated_ids.empty());
  CHECK(fusion::flatten(result.params) == fusion::flatten(params));  /* retrain skipped */
}

TEST_CASE("adversarial loop drives the llm generator with round-tagged ids") {
  std::vector<email::ParsedEmail> corpus;
  num::RngStream noise(7);
  for (int i = 0; i < 20; ++i) {
    bool phishing = i % 2 == 0;
    corpus.push_back(
        email::parse_eml(testsupport::make_loop_email(phishing, phishing && noise.uniform() < 0.5, i)));
  }
  agents::MockBackend backend;
  fusion::TrainOptions pre;
  pre.ppo.seed = 3;
  pre.passes = 2;
  fusion::TrainResult pretrained = fusion::train(corpus, backend, pre);

  std::filesystem::path run_dir =
      std::filesystem::temp_directory_path() / "pg_loop_llm_test";
  std::filesystem::remove_all(run_dir);

  LoopConfig cfg;
  cfg.seed = 3;
  cfg.use_llm_generator = true;
  cfg.retrain.passes = 2;
  cfg.run_dir = run_dir;
  LoopResult result = adversarial_loop(corpus, backend, pretrained.params, 1, cfg);
  REQUIRE(result.rounds.size() == 1);
  CHECK(result.rounds[0].variants == 10);
  CHECK(result.rounds[0].evaded <= result.rounds[0].variants);
  CHECK(result.pool.size() == corpus.size() + result.rounds[0].admitted);

  std::ifstream in(run_dir / "round_1" / "variants.jsonl");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    auto row = nlohmann::json::parse(line);
    CHECK(row.at("generator").get<std::string>() == "llm");
    auto id = row.at("variant_id").get<std::string>();
    CHECK(id.find("#llm-r1") != std::string::npos);
  }
  CHECK(rows == 10);
  std::filesystem::remove_all(run_dir);
}
