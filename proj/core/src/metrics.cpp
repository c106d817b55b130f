#include "phishguard/eval/metrics.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "phishguard/errors.hpp"

namespace phishguard::eval {

namespace {

bool is_phishing(email::CorpusLabel label) { return label == email::CorpusLabel::Phishing; }

bool correct(agents::Verdict pred, email::CorpusLabel label) {
  return (pred == agents::Verdict::Phishing) == is_phishing(label);
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

void check_labeled(const std::vector<email::CorpusLabel>& labels) {
  for (email::CorpusLabel label : labels) {
    require(label != email::CorpusLabel::Unlabeled, Errc::Precondition,
            "evaluation requires labeled data");
  }
}

std::string cell(const std::optional<double>& metric) {
  if (!metric) return "n/a";
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << percent_2dp(*metric);
  return out.str();
}

}  // namespace

ConfusionCounts confusion(const std::vector<agents::Verdict>& predictions,
                          const std::vector<email::CorpusLabel>& labels) {
  require(predictions.size() == labels.size(), Errc::LengthMismatch,
          "confusion: " + std::to_string(predictions.size()) + " predictions vs " +
              std::to_string(labels.size()) + " labels");
  require(!predictions.empty(), Errc::EmptyInput, "confusion: nothing to evaluate");
  check_labeled(labels);

  ConfusionCounts counts;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    bool pred_phish = predictions[i] == agents::Verdict::Phishing;
    if (is_phishing(labels[i])) {
      pred_phish ? ++counts.tp : ++counts.fn;
    } else {
      pred_phish ? ++counts.fp : ++counts.tn;
    }
  }
  return counts;
}

MetricReport metrics(const ConfusionCounts& c) {
  MetricReport report;
  report.recall = ratio(c.tp, c.tp + c.fn);
  report.precision = ratio(c.tp, c.tp + c.fp);
  report.accuracy = ratio(c.tp + c.tn, c.total());
  report.tnr = ratio(c.tn, c.tn + c.fp);
  report.fpr = ratio(c.fp, c.fp + c.tn);
  report.fnr = ratio(c.fn, c.fn + c.tp);
  if (report.precision && report.recall && *report.precision + *report.recall > 0.0) {
    report.f1 = 2.0 * *report.precision * *report.recall / (*report.precision + *report.recall);
  }
  return report;
}

double percent_2dp(double fraction) {
  return static_cast<double>(std::llround(fraction * 10000.0)) / 100.0;
}

PairedOutcomes paired_outcomes(const std::vector<agents::Verdict>& preds_a,
                               const std::vector<agents::Verdict>& preds_b,
                               const std::vector<email::CorpusLabel>& labels) {
  require(preds_a.size() == labels.size() && preds_b.size() == labels.size(),
          Errc::LengthMismatch, "paired_outcomes: prediction/label lengths differ");
  check_labeled(labels);

  PairedOutcomes outcomes;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bool a = correct(preds_a[i], labels[i]);
    bool b = correct(preds_b[i], labels[i]);
    if (a && b) ++outcomes.n11;
    else if (a && !b) ++outcomes.n10;
    else if (!a && b) ++outcomes.n01;
    else ++outcomes.n00;
  }
  return outcomes;
}

RunEvaluation evaluate_run(const std::vector<SystemRun>& systems,
                           const std::vector<email::CorpusLabel>& labels,
                           const std::vector<std::string>& groups) {
  require(!systems.empty(), Errc::EmptyInput, "evaluate_run: no systems");
  require(groups.size() == labels.size(), Errc::LengthMismatch,
          "evaluate_run: group keys do not align with labels");
  for (const SystemRun& run : systems) {
    require(run.predictions.size() == labels.size(), Errc::LengthMismatch,
            "evaluate_run: system " + run.name + " prediction count mismatch");
  }

  const SystemRun& primary = systems.front();
  RunEvaluation evaluation;
  evaluation.pooled_counts = confusion(primary.predictions, labels);
  evaluation.pooled = metrics(evaluation.pooled_counts);

  std::vector<std::string> group_order;
  std::map<std::string, std::pair<std::vector<agents::Verdict>, std::vector<email::CorpusLabel>>>
      split;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = split.find(groups[i]);
    if (it == split.end()) {
      group_order.push_back(groups[i]);
      it = split.emplace(groups[i], decltype(split)::mapped_type{}).first;
    }
    it->second.first.push_back(primary.predictions[i]);
    it->second.second.push_back(labels[i]);
  }
  for (const std::string& key : group_order) {
    GroupReport report;
    report.group = key;
    report.counts = confusion(split[key].first, split[key].second);
    report.metrics = metrics(report.counts);
    evaluation.groups.push_back(std::move(report));
  }

  std::vector<double> raw;
  for (std::size_t k = 1; k < systems.size(); ++k) {
    SystemComparison comparison;
    comparison.system_a = primary.name;
    comparison.system_b = systems[k].name;
    comparison.outcomes = paired_outcomes(primary.predictions, systems[k].predictions, labels);
    comparison.test = mcnemar(comparison.outcomes.n10, comparison.outcomes.n01);
    raw.push_back(comparison.test.raw_p);
    evaluation.comparisons.push_back(std::move(comparison));
  }
  if (!raw.empty()) {
    std::vector<double> adjusted = bh_adjust(raw);
    for (std::size_t k = 0; k < adjusted.size(); ++k) {
      evaluation.comparisons[k].test.adj_p = adjusted[k];
    }
  }
  return evaluation;
}

namespace {

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string p_cell(double p) {
  std::ostringstream out;
  out.precision(4);
  out << p;
  return out.str();
}

}  // namespace

std::string render_metrics_table(const RunEvaluation& evaluation) {
  std::size_t name_width = 12;
  for (const GroupReport& group : evaluation.groups) {
    name_width = std::max(name_width, group.group.size());
  }
  std::ostringstream out;
  out << pad_right("group", name_width);
  for (const char* label : {"recall", "precision", "accuracy", "f1", "tnr", "fpr", "fnr"}) {
    out << pad_left(label, 10);
  }
  out << '\n';
  auto row = [&](const std::string& name, const MetricReport& m) {
    out << pad_right(name, name_width);
    for (const auto& metric : {m.recall, m.precision, m.accuracy, m.f1, m.tnr, m.fpr, m.fnr}) {
      out << pad_left(cell(metric), 10);
    }
    out << '\n';
  };
  row("pooled", evaluation.pooled);
  for (const GroupReport& group : evaluation.groups) row(group.group, group.metrics);

  if (!evaluation.comparisons.empty()) {
    std::size_t pair_width = 24;
    for (const SystemComparison& c : evaluation.comparisons) {
      pair_width = std::max(pair_width, c.system_a.size() + c.system_b.size() + 4);
    }
    out << '\n'
        << pad_right("comparison", pair_width) << pad_left("n10", 6) << pad_left("n01", 6)
        << "  " << pad_right("method", 16) << pad_left("raw_p", 10) << pad_left("adj_p", 10)
        << '\n';
    for (const SystemComparison& c : evaluation.comparisons) {
      out << pad_right(c.system_a + " vs " + c.system_b, pair_width)
          << pad_left(std::to_string(c.outcomes.n10), 6)
          << pad_left(std::to_string(c.outcomes.n01), 6) << "  "
          << pad_right(std::string(to_string(c.test.method)), 16)
          << pad_left(p_cell(c.test.raw_p), 10)
          << pad_left(c.test.adj_p ? p_cell(*c.test.adj_p) : "-", 10) << '\n';
    }
  }
  return out.str();
}

}  // namespace phishguard::eval
