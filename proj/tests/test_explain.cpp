#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "phishguard/agents/mock_backend.hpp"
#include "phishguard/agents/runner.hpp"
#include "phishguard/email/parser.hpp"
#include "phishguard/errors.hpp"
#include "phishguard/explain/quality.hpp"
#include "phishguard/explain/simplify.hpp"

using namespace phishguard;
using namespace phishguard::explain;

namespace {

std::vector<agents::AgentReport> sample_reports() {
  email::RawEmail raw;
  raw.source_id = "exp-1";
  raw.bytes =
      "From: alerts@secure-mail.example\n"
      "Reply-To: handler@drop-box.example\n"
      "Subject: Verify your account\n"
      "Authentication-Results: mx; spf=fail; dkim=fail; dmarc=fail\n"
      "\n"
      "Please verify your account at http://login.phish.example/now\n";
  email::ParsedEmail mail = email::parse_eml(raw);
  agents::MockBackend backend;
  auto reports = agents::run_detection_agents(backend, mail);
  return {reports.begin(), reports.end()};
}

}  // namespace

TEST_CASE("simplify consolidates three reports into prose") {
  agents::MockBackend backend;
  auto reports = sample_reports();
  SimplifiedExplanation out = simplify(backend, reports, agents::ExplainMode::Plain);
  CHECK_FALSE(out.text.empty());
  CHECK(out.mode == agents::ExplainMode::Plain);
  CHECK(out.sources == std::array<std::string, 3>{"text", "url", "metadata"});
  CHECK(out.text.find('{') == std::string::npos);  /* prose, not verdict JSON */
  CHECK(out.text.find("phishing") != std::string::npos);
}

TEST_CASE("simplify carries expert mode through") {
  agents::MockBackend backend;
  SimplifiedExplanation out = simplify(backend, sample_reports(), agents::ExplainMode::Expert);
  CHECK(out.mode == agents::ExplainMode::Expert);
  CHECK_FALSE(out.text.empty());
}

TEST_CASE("simplify requires exactly three reports") {
  agents::MockBackend backend;
  auto reports = sample_reports();
  reports.pop_back();
  CHECK_THROWS_WITH_AS(simplify(backend, reports, agents::ExplainMode::Plain),
                       doctest::Contains("expected exactly 3"), Error);
  auto four = sample_reports();
  four.push_back(four.front());
  CHECK_THROWS_AS(simplify(backend, four, agents::ExplainMode::Plain), Error);
}

TEST_CASE("simplify rejects a blank backend reply") {
  class Blank : public agents::ChatBackend {
  public:
    std::string complete(const std::vector<agents::ChatMessage>&) override { return "  \n "; }
    const agents::ChatBackendConfig& config() const override { return config_; }

  private:
    agents::ChatBackendConfig config_;
  } backend;
  try {
    simplify(backend, sample_reports(), agents::ExplainMode::Plain);
    FAIL("expected EmptyExplanation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyExplanation);
  }
}

TEST_CASE("text stats follow the counting rules") {
  TextStats stats = count_text_stats("The cat sat.");
  CHECK(stats.words == 3);
  CHECK(stats.sentences == 1);
  CHECK(stats.syllables == 3);

  stats = count_text_stats("");
  CHECK(stats.words == 0);
  CHECK(stats.sentences == 1);
  CHECK(stats.syllables == 0);

  CHECK(count_text_stats("cake").syllables == 1);
  CHECK(count_text_stats("see").syllables == 1);
  CHECK(count_text_stats("banana").syllables == 3);

  stats = count_text_stats("One. Two! Three?");
  CHECK(stats.sentences == 3);
  CHECK(count_text_stats("Wait... what?").sentences == 2);
  CHECK(count_text_stats("no terminator here").sentences == 1);
}

TEST_CASE("fres evaluates the formula") {
  CHECK(fres(3, 1, 3) == doctest::Approx(119.19));
  CHECK(fres(10, 1, 20) == doctest::Approx(27.485).epsilon(1e-9));
  CHECK_THROWS_WITH_AS(fres(10, 0, 12), doctest::Contains("sentence count"), Error);
  CHECK_THROWS_WITH_AS(fres(0, 1, 0), doctest::Contains("word count"), Error);
}

TEST_CASE("fres falls as syllable density and sentence length rise") {
  CHECK(fres(10, 2, 13) < fres(10, 2, 12));
  CHECK(fres(20, 2, 24) < fres(20, 4, 24));
}

TEST_CASE("rouge1 recall uses clipped counts over normalized tokens") {
  CHECK(rouge1_recall("a b c", "a b c") == doctest::Approx(1.0));
  CHECK(rouge1_recall("urgent account verify", "verify your account") ==
        doctest::Approx(2.0 / 3.0));
  CHECK(rouge1_recall("xyz", "abc def") == doctest::Approx(0.0));
  CHECK(rouge1_recall("Verify, ACCOUNT!", "verify account") == doctest::Approx(1.0));
  CHECK_THROWS_WITH_AS(rouge1_recall("anything", "  ...  "), doctest::Contains("reference"),
                       Error);
}

TEST_CASE("rouge1 recall never drops when the candidate grows") {
  std::string reference = "verify your account today";
  std::string candidate = "nothing";
  double last = rouge1_recall(candidate, reference);
  for (const char* extra : {"verify", "filler", "account", "your", "today"}) {
    candidate += " ";
    candidate += extra;
    double next = rouge1_recall(candidate, reference);
    CHECK(next >= last);
    last = next;
  }
  CHECK(last == doctest::Approx(1.0));
}

TEST_CASE("cosine similarity spans the full range") {
  std::vector<double> a = {1.0, 2.0, 3.0};
  std::vector<double> b = {2.0, 4.0, 6.0};
  std::vector<double> neg = {-1.0, -2.0, -3.0};
  CHECK(cosine_sim(a, a) == doctest::Approx(1.0));
  CHECK(cosine_sim(a, b) == doctest::Approx(1.0));
  CHECK(cosine_sim(a, neg) == doctest::Approx(-1.0));

  std::vector<double> e1 = {1.0, 0.0};
  std::vector<double> e2 = {0.0, 1.0};
  CHECK(cosine_sim(e1, e2) == doctest::Approx(0.0));

  std::vector<double> zero = {0.0, 0.0};
  CHECK_THROWS_WITH_AS(cosine_sim(e1, zero), doctest::Contains("zero-magnitude"), Error);
  std::vector<double> longer = {1.0, 2.0, 3.0, 4.0};
  CHECK_THROWS_WITH_AS(cosine_sim(a, longer), doctest::Contains("lengths"), Error);
}

TEST_CASE("cosine similarity is scale invariant") {
  std::vector<double> a = {0.3, 1.7, 2.2, 0.4};
  std::vector<double> b = {1.1, 0.2, 0.9, 2.5};
  std::vector<double> scaled = a;
  for (double& x : scaled) x *= 7.5;
  CHECK(cosine_sim(scaled, b) == doctest::Approx(cosine_sim(a, b)));
}

TEST_CASE("embed_text counts terms against the vocabulary") {
  std::vector<std::string> vocab = {"a", "b"};
  std::vector<double> v = embed_text("a a b", vocab);
  REQUIRE(v.size() == 2);
  CHECK(v[0] == 2.0);
  CHECK(v[1] == 1.0);
  v = embed_text("a unseen words a", vocab);
  CHECK(v[0] == 2.0);
  CHECK(v[1] == 0.0);
}

TEST_CASE("text cosine compares over the union vocabulary") {
  CHECK(text_cosine("the same words", "the same words") == doctest::Approx(1.0));
  CHECK(text_cosine("alpha beta", "gamma delta") == doctest::Approx(0.0));
  CHECK(text_cosine("alpha beta", "beta alpha") == doctest::Approx(1.0));
}

TEST_CASE("unigram model applies add-one smoothing") {
  std::map<std::string, std::size_t> counts{{"the", 3}, {"cat", 1}};
  UnigramModel lm = UnigramModel::from_counts(counts);
  CHECK(lm.prob("the") == doctest::Approx(4.0 / 7.0));
  CHECK(lm.prob("cat") == doctest::Approx(2.0 / 7.0));
  CHECK(lm.prob("dog") == doctest::Approx(1.0 / 7.0));  /* unknown bucket */
  CHECK(lm.vocab_size() == 2);

  UnigramModel from_docs = UnigramModel::from_corpus({"the cat", "the the"});
  CHECK(from_docs.prob("the") == doctest::Approx(4.0 / 7.0));

  CHECK_THROWS_AS(UnigramModel::from_counts({}), Error);
}

TEST_CASE("perplexity matches the closed forms") {
  std::map<std::string, double> uniform{{"a", 0.25}, {"b", 0.25}, {"c", 0.25}, {"d", 0.25}};
  UnigramModel lm(uniform);
  CHECK(perplexity("a b c d a b", lm) == doctest::Approx(4.0).epsilon(1e-9));

  std::map<std::string, double> point{{"x", 1.0}};
  UnigramModel plm(point);
  CHECK(perplexity("x x x", plm) == doctest::Approx(1.0));

  CHECK_THROWS_WITH_AS(perplexity("  ", lm), doctest::Contains("no tokens"), Error);
  CHECK_THROWS_WITH_AS(perplexity("unheard", plm), doctest::Contains("smoothing mass"), Error);
}

TEST_CASE("perplexity is at least one and hits vocab size when uniform") {
  std::map<std::string, double> uniform;
  for (char c = 'a'; c < 'a' + 7; ++c) uniform[std::string(1, c)] = 1.0;
  UnigramModel lm(uniform);
  CHECK(perplexity("a b c d e f g", lm) == doctest::Approx(7.0).epsilon(1e-9));

  UnigramModel skewed = UnigramModel::from_counts({{"high", 50}, {"low", 1}});
  CHECK(perplexity("high high low", skewed) >= 1.0);
  CHECK(perplexity("high", skewed) >= 1.0);
}

TEST_CASE("topic coherence is one for perfectly co-occurring pairs") {
  std::vector<std::string> docs;
  for (int i = 0; i < 6; ++i) {
    std::string a = "term" + std::to_string(i) + "a";
    std::string b = "term" + std::to_string(i) + "b";
    docs.push_back(a + " " + b + " " + a + " " + b);
  }
  CHECK(topic_coherence(docs, 5, 10) == doctest::Approx(1.0));
  CHECK(topic_coherence(docs, 5, 10) == topic_coherence(docs, 5, 10));
}

TEST_CASE("topic coherence is near zero for independent terms") {
  std::vector<std::string> docs;
  for (int i = 0; i < 16; ++i) {
    std::string doc;
    if (i & 1) doc += "alpha ";
    if (i & 2) doc += "beta";
    docs.push_back(doc);
  }
  double coherence = topic_coherence(docs, 1, 10);
  CHECK(std::abs(coherence) < 0.1);
}

TEST_CASE("topic coherence validates its inputs") {
  std::vector<std::string> three = {"a b", "c d", "e f"};
  CHECK_THROWS_WITH_AS(topic_coherence(three, 5, 10), doctest::Contains("documents"), Error);
  CHECK_THROWS_AS(topic_coherence(three, 0, 10), Error);
  CHECK_THROWS_AS(topic_coherence(three, 1, 1), Error);
}

TEST_CASE("quality report assembles all five metrics") {
  UnigramModel lm = UnigramModel::from_corpus(
      {"this email shows signs of phishing", "the link is suspicious"});
  TextQualityReport report = assess_quality("This email shows a suspicious link.",
                                            "The email contains a suspicious link.", lm, 0.42);
  CHECK(report.perplexity > 0.0);
  CHECK(report.topic_coherence == doctest::Approx(0.42));
  CHECK(std::isfinite(report.fres));
  CHECK(report.rouge1_recall > 0.0);
  CHECK(report.rouge1_recall <= 1.0);
  CHECK(report.cosine > 0.0);
  CHECK(report.cosine <= 1.0);
}
