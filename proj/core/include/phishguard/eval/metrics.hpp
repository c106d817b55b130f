#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "phishguard/agents/types.hpp"
#include "phishguard/email/types.hpp"
#include "phishguard/eval/mcnemar.hpp"

namespace phishguard::eval {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
};

/* Fractions in [0,1]; a metric is empty when its denominator is zero. */
struct MetricReport {
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> accuracy;
  std::optional<double> f1;
  std::optional<double> tnr;
  std::optional<double> fpr;
  std::optional<double> fnr;
};

/* Phishing is the positive class. Throws LengthMismatch and EmptyInput. */
ConfusionCounts confusion(const std::vector<agents::Verdict>& predictions,
                          const std::vector<email::CorpusLabel>& labels);

MetricReport metrics(const ConfusionCounts& counts);

/* Half-up percent with two decimals, the table display convention. */
double percent_2dp(double fraction);

struct PairedOutcomes {
  std::size_t n10 = 0;  /* A correct, B wrong */
  std::size_t n01 = 0;  /* A wrong, B correct */
  std::size_t n11 = 0;
  std::size_t n00 = 0;
};

PairedOutcomes paired_outcomes(const std::vector<agents::Verdict>& preds_a,
                               const std::vector<agents::Verdict>& preds_b,
                               const std::vector<email::CorpusLabel>& labels);

struct SystemRun {
  std::string name;
  std::vector<agents::Verdict> predictions;
};

struct GroupReport {
  std::string group;
  ConfusionCounts counts;
  MetricReport metrics;
};

struct SystemComparison {
  std::string system_a;
  std::string system_b;
  PairedOutcomes outcomes;
  McNemarResult test;
};

struct RunEvaluation {
  ConfusionCounts pooled_counts;
  MetricReport pooled;
  std::vector<GroupReport> groups;  /* first-appearance order */
  std::vector<SystemComparison> comparisons;
};

/* Metrics for the first system, split by group key and pooled, plus McNemar
   comparisons of the first system against each other one; adjusted p-values
   are BH over that comparison family. */
RunEvaluation evaluate_run(const std::vector<SystemRun>& systems,
                           const std::vector<email::CorpusLabel>& labels,
                           const std::vector<std::string>& groups);

std::string render_metrics_table(const RunEvaluation& evaluation);

}  // namespace phishguard::eval
