#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "phishguard/errors.hpp"
#include "phishguard/eval/mcnemar.hpp"
#include "phishguard/eval/metrics.hpp"

using namespace phishguard;
using namespace phishguard::eval;
using agents::Verdict;
using email::CorpusLabel;

namespace {

constexpr Verdict P = Verdict::Phishing;
constexpr Verdict L = Verdict::Legitimate;
constexpr CorpusLabel PL = CorpusLabel::Phishing;
constexpr CorpusLabel LL = CorpusLabel::Legitimate;

}  // namespace

TEST_CASE("confusion tabulates against phishing as positive") {
  ConfusionCounts c = confusion({P, L}, {PL, LL});
  CHECK(c.tp == 1);
  CHECK(c.tn == 1);
  CHECK(c.fp == 0);
  CHECK(c.fn == 0);

  c = confusion({P}, {LL});
  CHECK(c.fp == 1);
  CHECK(c.total() == 1);

  CHECK_THROWS_WITH_AS(confusion({P, L}, {PL}), doctest::Contains("predictions"), Error);
  CHECK_THROWS_WITH_AS(confusion({}, {}), doctest::Contains("nothing to evaluate"), Error);
  CHECK_THROWS_AS(confusion({P}, {CorpusLabel::Unlabeled}), Error);
}

TEST_CASE("metric report reproduces the full-run fixture") {
  MetricReport m = metrics({977, 2918, 82, 2});
  REQUIRE(m.recall);
  CHECK(percent_2dp(*m.recall) == 99.80);
  CHECK(percent_2dp(*m.precision) == 92.26);
  CHECK(percent_2dp(*m.accuracy) == 97.89);
  CHECK(percent_2dp(*m.f1) == 95.88);
  CHECK(percent_2dp(*m.tnr) == 97.27);
  CHECK(percent_2dp(*m.fpr) == 2.73);
  CHECK(percent_2dp(*m.fnr) == 0.20);
}

TEST_CASE("metric identities and degenerate denominators") {
  MetricReport perfect = metrics({1, 1, 0, 0});
  CHECK(*perfect.recall == doctest::Approx(1.0));
  CHECK(*perfect.precision == doctest::Approx(1.0));
  CHECK(*perfect.accuracy == doctest::Approx(1.0));
  CHECK(*perfect.f1 == doctest::Approx(1.0));

  MetricReport no_pos = metrics({0, 5, 0, 0});
  CHECK_FALSE(no_pos.recall);
  CHECK_FALSE(no_pos.precision);
  CHECK_FALSE(no_pos.f1);
  CHECK_FALSE(no_pos.fnr);
  CHECK(*no_pos.tnr == doctest::Approx(1.0));
  CHECK(*no_pos.fpr == doctest::Approx(0.0));
  CHECK(*no_pos.accuracy == doctest::Approx(1.0));

  for (ConfusionCounts c : {ConfusionCounts{10, 20, 3, 4}, ConfusionCounts{1, 0, 7, 2},
                            ConfusionCounts{42, 17, 5, 11}}) {
    MetricReport m = metrics(c);
    CHECK(*m.recall + *m.fnr == doctest::Approx(1.0));
    CHECK(*m.tnr + *m.fpr == doctest::Approx(1.0));
    CHECK(*m.f1 ==
          doctest::Approx(2.0 * *m.precision * *m.recall / (*m.precision + *m.recall)));
  }
}

TEST_CASE("percent display rounds half up to two decimals") {
  CHECK(percent_2dp(0.12345) == 12.35);
  CHECK(percent_2dp(0.97885) == 97.89);
  CHECK(percent_2dp(0.0) == 0.0);
  CHECK(percent_2dp(1.0) == 100.0);
}

TEST_CASE("paired outcomes cross-tabulate correctness") {
  std::vector<Verdict> a(7, P);
  std::vector<Verdict> b(7, L);
  std::vector<CorpusLabel> labels(7, PL);
  PairedOutcomes o = paired_outcomes(a, b, labels);
  CHECK(o.n10 == 7);
  CHECK(o.n01 == 0);
  CHECK(o.n11 == 0);
  CHECK(o.n00 == 0);

  o = paired_outcomes(a, a, labels);
  CHECK(o.n10 == 0);
  CHECK(o.n01 == 0);
  CHECK(o.n11 == 7);

  CHECK_THROWS_AS(paired_outcomes(a, {P}, labels), Error);
}

TEST_CASE("mcnemar exact matches the closed-form tails") {
  CHECK(mcnemar_exact(6, 0) == 0.015625);
  CHECK(mcnemar_exact(1, 0) == 0.5);
  CHECK(mcnemar_exact(0, 0) == 1.0);
  CHECK(mcnemar_exact(4, 0) == 0.0625);
  CHECK(mcnemar_exact(12, 2) == doctest::Approx(106.0 / 16384.0).epsilon(1e-12));
  CHECK(mcnemar_exact(23, 0) == doctest::Approx(std::ldexp(1.0, -23)).epsilon(1e-12));
}

TEST_CASE("mcnemar exact tails are complementary") {
  for (auto [a, b] : std::vector<std::pair<std::size_t, std::size_t>>{
           {6, 0}, {12, 2}, {18, 9}, {30, 20}, {1, 1}}) {
    std::size_t n = a + b;
    double upper = mcnemar_exact(a, b);
    double lower = mcnemar_exact(n - a + 1, a - 1);  /* P(X <= a-1) by symmetry */
    CHECK(upper + lower == doctest::Approx(1.0).epsilon(1e-12));
  }
  /* log-space path */
  double upper = mcnemar_exact(200, 150);
  double lower = mcnemar_exact(151, 199);
  CHECK(upper + lower == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mcnemar mid-p matches the oracle values") {
  CHECK(mcnemar_midp(62, 37) == doctest::Approx(0.006016487862681739).epsilon(1e-9));
  CHECK(mcnemar_midp(20, 20) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mcnemar_midp(18, 9) == doctest::Approx(0.04357927665114403).epsilon(1e-12));
  CHECK(mcnemar_midp(18, 8) == doctest::Approx(0.026119492948055267).epsilon(1e-12));
  CHECK(mcnemar_midp(46, 18) == doctest::Approx(2.110651617e-4).epsilon(1e-9));
  CHECK(mcnemar_midp(305, 3) == doctest::Approx(4.714963747735455e-87).epsilon(1e-9));
  CHECK(mcnemar_midp(28, 0) == doctest::Approx(1.862645149230957e-09).epsilon(1e-9));
  CHECK(mcnemar_midp(305, 3) < 1e-15);
}

TEST_CASE("mid-p sits between the two exact tails") {
  for (auto [a, b] : std::vector<std::pair<std::size_t, std::size_t>>{
           {18, 9}, {46, 18}, {62, 37}, {28, 1}}) {
    double strict = mcnemar_exact(a + 1, b - 1);  /* P(X > a), same n */
    double weak = mcnemar_exact(a, b);            /* P(X >= a) */
    double mid = mcnemar_midp(a, b);
    CHECK(strict <= mid);
    CHECK(mid <= weak);
  }
}

TEST_CASE("mcnemar routing follows the count threshold") {
  McNemarResult r = mcnemar(23, 0);
  CHECK(r.method == TestMethod::ExactBinomial);
  CHECK(r.raw_p == doctest::Approx(std::ldexp(1.0, -23)).epsilon(1e-12));
  CHECK_FALSE(r.adj_p);

  r = mcnemar(18, 8);  /* n = 26 crosses the threshold */
  CHECK(r.method == TestMethod::MidP);
  CHECK(r.raw_p == doctest::Approx(0.026119492948055267).epsilon(1e-12));

  CHECK(mcnemar(0, 0).raw_p == 1.0);
  CHECK(to_string(TestMethod::ExactBinomial) == "exact_binomial");
  CHECK(to_string(TestMethod::MidP) == "mid_p");
}

TEST_CASE("bh adjustment follows the step-up rule") {
  CHECK(bh_adjust({0.01, 0.02, 0.03}) == std::vector<double>{0.03, 0.03, 0.03});
  CHECK(bh_adjust({0.2}) == std::vector<double>{0.2});
  CHECK(bh_adjust({0.5, 1.0}) == std::vector<double>{1.0, 1.0});
  CHECK_THROWS_WITH_AS(bh_adjust({0.4, 1.5}), doctest::Contains("outside"), Error);
  CHECK_THROWS_AS(bh_adjust({-0.1}), Error);
}

TEST_CASE("bh adjustment dominates raw values and keeps sorted order") {
  std::vector<double> raw = {0.04, 0.001, 0.9, 0.3, 0.011, 0.07, 0.2, 0.011};
  std::vector<double> adj = bh_adjust(raw);
  REQUIRE(adj.size() == raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(adj[i] >= raw[i]);
    CHECK(adj[i] <= 1.0);
  }
  /* re-sorting both by raw p keeps adjusted values nondecreasing */
  std::vector<std::size_t> order(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    CHECK(adj[order[i]] >= adj[order[i - 1]]);
  }
}

TEST_CASE("comparison-table family reproduces the adjusted values") {
  /* count pairs in table order; exact for n <= 25, mid-p above */
  std::vector<std::pair<std::size_t, std::size_t>> pairs = {
      {1, 0},   {0, 0},   {4, 0},  {6, 0},  {4, 0},  {12, 2},
      {263, 4}, {305, 3}, {62, 37}, {115, 7}, {161, 2}, {46, 18},
      {50, 3},  {52, 4},  {18, 9},  {28, 0},  {23, 0},  {18, 8},
  };
  std::vector<double> raw;
  for (auto [a, b] : pairs) raw.push_back(mcnemar(a, b).raw_p);
  std::vector<double> adj = bh_adjust(raw);
  REQUIRE(adj.size() == 18);

  CHECK(adj[0] == doctest::Approx(0.529412).epsilon(1e-4));   /* (1,0) */
  CHECK(adj[1] == doctest::Approx(1.0).epsilon(1e-12));        /* (0,0) */
  CHECK(adj[2] == doctest::Approx(0.070312).epsilon(1e-4));    /* (4,0) */
  CHECK(adj[3] == doctest::Approx(0.023438).epsilon(1e-4));    /* (6,0) */
  CHECK(adj[4] == doctest::Approx(0.070312).epsilon(1e-4));
  CHECK(adj[5] == doctest::Approx(0.010587).epsilon(1e-4));    /* (12,2) */
  CHECK(adj[8] == doctest::Approx(0.010587).epsilon(1e-4));    /* (62,37) */
  CHECK(adj[14] == doctest::Approx(0.056030).epsilon(1e-4));   /* (18,9) */
  CHECK(adj[17] == doctest::Approx(0.036165).epsilon(1e-4));   /* (18,8) */
  CHECK(adj[11] == doctest::Approx(0.000422).epsilon(1e-3));   /* (46,18) */
  for (std::size_t i : {6, 7, 9, 10, 12, 13, 15, 16}) {
    CHECK(adj[i] < 0.001);
  }
}

TEST_CASE("evaluate_run splits groups and pools them consistently") {
  std::vector<CorpusLabel> labels = {PL, PL, PL, LL, LL, LL, PL, LL};
  std::vector<std::string> groups = {"nigerian", "nigerian", "nazario", "enron",
                                     "enron",    "trec",     "nazario", "trec"};
  SystemRun ours{"ours", {P, P, P, L, L, L, L, P}};  /* one fn, one fp */
  RunEvaluation ev = evaluate_run({ours}, labels, groups);

  CHECK(ev.pooled_counts.tp == 3);
  CHECK(ev.pooled_counts.fn == 1);
  CHECK(ev.pooled_counts.tn == 3);
  CHECK(ev.pooled_counts.fp == 1);

  REQUIRE(ev.groups.size() == 4);
  CHECK(ev.groups[0].group == "nigerian");  /* first-appearance order */
  CHECK(ev.groups[1].group == "nazario");
  CHECK(ev.groups[2].group == "enron");
  CHECK(ev.groups[3].group == "trec");

  std::size_t total = 0;
  ConfusionCounts sum;
  for (const GroupReport& g : ev.groups) {
    total += g.counts.total();
    sum.tp += g.counts.tp;
    sum.tn += g.counts.tn;
    sum.fp += g.counts.fp;
    sum.fn += g.counts.fn;
  }
  CHECK(total == labels.size());
  CHECK(sum.tp == ev.pooled_counts.tp);
  CHECK(sum.tn == ev.pooled_counts.tn);
  CHECK(sum.fp == ev.pooled_counts.fp);
  CHECK(sum.fn == ev.pooled_counts.fn);

  CHECK(*ev.groups[0].metrics.recall == doctest::Approx(1.0));
  CHECK(*ev.groups[1].metrics.recall == doctest::Approx(0.5));
  CHECK(ev.comparisons.empty());
}

TEST_CASE("evaluate_run with one group matches the pooled report") {
  std::vector<CorpusLabel> labels = {PL, LL, PL};
  std::vector<std::string> groups(3, "all");
  SystemRun run{"sys", {P, L, L}};
  RunEvaluation ev = evaluate_run({run}, labels, groups);
  REQUIRE(ev.groups.size() == 1);
  CHECK(ev.groups[0].counts.tp == ev.pooled_counts.tp);
  CHECK(ev.groups[0].counts.total() == ev.pooled_counts.total());
  CHECK(*ev.groups[0].metrics.accuracy == *ev.pooled.accuracy);
}

TEST_CASE("evaluate_run compares systems with a bh family") {
  std::vector<CorpusLabel> labels(10, PL);
  std::vector<std::string> groups(10, "all");
  SystemRun ours{"ours", std::vector<Verdict>(10, P)};
  SystemRun twin{"twin", std::vector<Verdict>(10, P)};
  std::vector<Verdict> mixed(10, P);
  mixed[0] = mixed[1] = mixed[2] = L;
  SystemRun worse{"worse", mixed};

  RunEvaluation ev = evaluate_run({ours, twin, worse}, labels, groups);
  REQUIRE(ev.comparisons.size() == 2);
  CHECK(ev.comparisons[0].system_b == "twin");
  CHECK(ev.comparisons[0].outcomes.n10 == 0);
  CHECK(ev.comparisons[0].outcomes.n01 == 0);
  CHECK(ev.comparisons[0].test.raw_p == 1.0);
  REQUIRE(ev.comparisons[0].test.adj_p);
  CHECK(*ev.comparisons[0].test.adj_p == 1.0);

  CHECK(ev.comparisons[1].outcomes.n10 == 3);
  CHECK(ev.comparisons[1].test.method == TestMethod::ExactBinomial);
  CHECK(ev.comparisons[1].test.raw_p == 0.125);
  CHECK(*ev.comparisons[1].test.adj_p == doctest::Approx(0.25));

  CHECK_THROWS_AS(evaluate_run({}, labels, groups), Error);
  SystemRun short_run{"short", {P}};
  CHECK_THROWS_AS(evaluate_run({short_run}, labels, groups), Error);
}

TEST_CASE("metrics table renders pooled and group rows") {
  std::vector<CorpusLabel> labels = {PL, LL, PL, LL};
  std::vector<std::string> groups = {"a", "a", "b", "b"};
  SystemRun ours{"ours", {P, L, P, P}};
  SystemRun other{"other", {L, L, P, L}};
  RunEvaluation ev = evaluate_run({ours, other}, labels, groups);
  std::string table = render_metrics_table(ev);
  CHECK(table.find("pooled") != std::string::npos);
  CHECK(table.find("\na") != std::string::npos);
  CHECK(table.find("ours vs other") != std::string::npos);
  CHECK(table.find("recall") != std::string::npos);
}
