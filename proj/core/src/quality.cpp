#include "phishguard/explain/quality.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::explain {

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; }

std::size_t syllables_in(const std::string& word) {
  std::size_t groups = 0;
  bool in_group = false;
  bool last_group_is_final_e = false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    bool v = is_vowel(word[i]);
    if (v && !in_group) {
      ++groups;
      last_group_is_final_e = word[i] == 'e' && i + 1 == word.size();
    } else if (v && in_group && i + 1 == word.size()) {
      last_group_is_final_e = false;  /* final e shares a group, not silent */
    }
    in_group = v;
  }
  if (groups > 1 && last_group_is_final_e) --groups;
  return std::max<std::size_t>(groups, 1);
}

}  // namespace

TextStats count_text_stats(std::string_view input) {
  TextStats stats;
  std::vector<std::string> tokens = text::tokenize(input);
  stats.words = tokens.size();
  for (const std::string& token : tokens) stats.syllables += syllables_in(token);

  bool in_run = false;
  for (char c : input) {
    bool ender = c == '.' || c == '!' || c == '?';
    if (ender && !in_run) ++stats.sentences;
    in_run = ender;
  }
  stats.sentences = std::max<std::size_t>(stats.sentences, 1);
  return stats;
}

double fres(std::size_t words, std::size_t sentences, std::size_t syllables) {
  require(words > 0, Errc::ZeroDenominator, "fres: word count is zero");
  require(sentences > 0, Errc::ZeroDenominator, "fres: sentence count is zero");
  double w = static_cast<double>(words);
  double s = static_cast<double>(sentences);
  double y = static_cast<double>(syllables);
  return 206.835 - 1.015 * (w / s) - 84.6 * (y / w);
}

double rouge1_recall(std::string_view candidate, std::string_view reference) {
  std::vector<std::string> ref_tokens = text::tokenize(reference);
  require(!ref_tokens.empty(), Errc::EmptyReference, "rouge1_recall: reference has no tokens");
  std::map<std::string, std::size_t> ref_counts;
  for (const std::string& t : ref_tokens) ++ref_counts[t];
  std::map<std::string, std::size_t> cand_counts;
  for (const std::string& t : text::tokenize(candidate)) ++cand_counts[t];

  std::size_t overlap = 0;
  for (const auto& [token, count] : ref_counts) {
    auto it = cand_counts.find(token);
    if (it != cand_counts.end()) overlap += std::min(count, it->second);
  }
  return static_cast<double>(overlap) / static_cast<double>(ref_tokens.size());
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), Errc::DimensionMismatch,
          "cosine_sim: vector lengths " + std::to_string(a.size()) + " vs " +
              std::to_string(b.size()));
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  require(na > 0.0 && nb > 0.0, Errc::ZeroVector, "cosine_sim: zero-magnitude vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> embed_text(std::string_view input, const std::vector<std::string>& vocab) {
  std::map<std::string, std::size_t> counts;
  for (const std::string& t : text::tokenize(input)) ++counts[t];
  std::vector<double> out(vocab.size(), 0.0);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    auto it = counts.find(vocab[i]);
    if (it != counts.end()) out[i] = static_cast<double>(it->second);
  }
  return out;
}

double text_cosine(std::string_view a, std::string_view b) {
  std::set<std::string> vocab_set;
  for (const std::string& t : text::tokenize(a)) vocab_set.insert(t);
  for (const std::string& t : text::tokenize(b)) vocab_set.insert(t);
  std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
  std::vector<double> va = embed_text(a, vocab);
  std::vector<double> vb = embed_text(b, vocab);
  return cosine_sim(va, vb);
}

UnigramModel UnigramModel::from_counts(const std::map<std::string, std::size_t>& counts) {
  require(!counts.empty(), Errc::EmptyModel, "unigram model needs at least one training token");
  double total = 0.0;
  for (const auto& [token, count] : counts) total += static_cast<double>(count);
  double denom = total + static_cast<double>(counts.size()) + 1.0;

  UnigramModel model;
  for (const auto& [token, count] : counts) {
    model.probs_[token] = (static_cast<double>(count) + 1.0) / denom;
  }
  model.unknown_prob_ = 1.0 / denom;
  return model;
}

UnigramModel UnigramModel::from_corpus(const std::vector<std::string>& documents) {
  std::map<std::string, std::size_t> counts;
  for (const std::string& doc : documents) {
    for (const std::string& t : text::tokenize(doc)) ++counts[t];
  }
  return from_counts(counts);
}

UnigramModel::UnigramModel(const std::map<std::string, double>& weights, double unknown_weight) {
  require(!weights.empty(), Errc::EmptyModel, "unigram model needs a non-empty distribution");
  require(unknown_weight >= 0.0, Errc::ConfigError, "unknown_weight must be non-negative");
  double total = unknown_weight;
  for (const auto& [token, weight] : weights) {
    require(weight > 0.0, Errc::ConfigError, "token weight must be positive: " + token);
    total += weight;
  }
  for (const auto& [token, weight] : weights) probs_[token] = weight / total;
  unknown_prob_ = unknown_weight / total;
}

double UnigramModel::prob(const std::string& token) const {
  auto it = probs_.find(token);
  if (it != probs_.end()) return it->second;
  require(unknown_prob_ > 0.0, Errc::Precondition,
          "model has no smoothing mass for unseen token: " + token);
  return unknown_prob_;
}

double UnigramModel::log_prob(const std::string& token) const { return std::log(prob(token)); }

double perplexity(std::string_view input, const UnigramModel& lm) {
  std::vector<std::string> tokens = text::tokenize(input);
  require(!tokens.empty(), Errc::EmptyText, "perplexity: text has no tokens");
  double sum = 0.0;
  for (const std::string& t : tokens) sum += lm.log_prob(t);
  return std::exp(-sum / static_cast<double>(tokens.size()));
}

namespace {

double npmi(std::size_t df_a, std::size_t df_b, std::size_t df_ab, std::size_t docs) {
  double d = static_cast<double>(docs) + 1.0;
  double pa = (static_cast<double>(df_a) + 1.0) / d;
  double pb = (static_cast<double>(df_b) + 1.0) / d;
  double pab = (static_cast<double>(df_ab) + 1.0) / d;
  if (pab >= 1.0) return 0.0;  /* pair in every document: no information */
  double value = std::log(pab / (pa * pb)) / -std::log(pab);
  return std::clamp(value, -1.0, 1.0);
}

}  // namespace

double topic_coherence(const std::vector<std::string>& explanations, std::size_t topics,
                       std::size_t top_k) {
  require(topics >= 1, Errc::ConfigError, "topic_coherence: topics must be at least 1");
  require(top_k >= 2, Errc::ConfigError, "topic_coherence: top_k must be at least 2");
  require(explanations.size() >= topics, Errc::CorpusTooSmall,
          "topic_coherence: " + std::to_string(explanations.size()) + " documents for " +
              std::to_string(topics) + " topics");

  std::vector<std::set<std::string>> doc_terms;
  doc_terms.reserve(explanations.size());
  std::map<std::string, std::size_t> df;
  for (const std::string& doc : explanations) {
    std::set<std::string> terms;
    for (const std::string& t : text::tokenize(doc)) terms.insert(t);
    for (const std::string& t : terms) ++df[t];
    doc_terms.push_back(std::move(terms));
  }

  /* candidate pool: document frequency desc, then lexicographic */
  std::vector<std::string> candidates;
  candidates.reserve(df.size());
  for (const auto& [term, count] : df) candidates.push_back(term);
  std::sort(candidates.begin(), candidates.end(), [&](const std::string& a, const std::string& b) {
    if (df[a] != df[b]) return df[a] > df[b];
    return a < b;
  });
  if (candidates.size() > topics * top_k) candidates.resize(topics * top_k);
  if (candidates.size() < 2) return 0.0;

  auto co_df = [&](const std::string& a, const std::string& b) {
    std::size_t n = 0;
    for (const auto& terms : doc_terms) {
      if (terms.count(a) != 0 && terms.count(b) != 0) ++n;
    }
    return n;
  };

  /* leaders first: a seed never co-occurs with an earlier seed, so each topic
     starts from a distinct co-occurrence component */
  std::vector<std::vector<std::string>> clusters;
  std::vector<bool> used(candidates.size(), false);
  for (std::size_t i = 0; i < candidates.size() && clusters.size() < topics; ++i) {
    bool fresh = true;
    for (const auto& cluster : clusters) {
      if (co_df(cluster.front(), candidates[i]) > 0) {
        fresh = false;
        break;
      }
    }
    if (!fresh) continue;
    clusters.push_back({candidates[i]});
    used[i] = true;
  }
  /* grow each topic with the terms that actually share documents with it */
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (used[i]) continue;
    std::size_t best = 0;
    std::size_t best_co = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (clusters[c].size() >= top_k) continue;
      std::size_t co = co_df(clusters[c].front(), candidates[i]);
      if (co > best_co) {
        best = c;
        best_co = co;
      }
    }
    if (best_co > 0) clusters[best].push_back(candidates[i]);
  }

  double total = 0.0;
  std::size_t scored = 0;
  for (const auto& cluster : clusters) {
    if (cluster.size() < 2) continue;
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < cluster.size(); ++i) {
      for (std::size_t j = i + 1; j < cluster.size(); ++j) {
        sum += npmi(df[cluster[i]], df[cluster[j]], co_df(cluster[i], cluster[j]),
                    explanations.size());
        ++pairs;
      }
    }
    total += sum / static_cast<double>(pairs);
    ++scored;
  }
  return scored == 0 ? 0.0 : total / static_cast<double>(scored);
}

TextQualityReport assess_quality(std::string_view candidate, std::string_view reference,
                                 const UnigramModel& lm, double coherence) {
  TextQualityReport report;
  report.perplexity = perplexity(candidate, lm);
  report.topic_coherence = coherence;
  TextStats stats = count_text_stats(candidate);
  report.fres = fres(stats.words, stats.sentences, stats.syllables);
  report.rouge1_recall = rouge1_recall(candidate, reference);
  report.cosine = text_cosine(candidate, reference);
  return report;
}

}  // namespace phishguard::explain
