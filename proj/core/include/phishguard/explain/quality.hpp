#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phishguard::explain {

struct TextStats {
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t syllables = 0;
};

/* Words are whitespace tokens with edge punctuation stripped; sentences are
   runs of .!? (at least 1); syllables come from a vowel-group heuristic with
   the trailing silent-e dropped and a minimum of one per word. */
TextStats count_text_stats(std::string_view text);

/* Flesch reading ease. Throws ZeroDenominator when either count is zero. */
double fres(std::size_t words, std::size_t sentences, std::size_t syllables);

/* Unigram recall of the reference by the candidate over clipped counts.
   Tokens are lowercased with punctuation stripped. Throws EmptyReference. */
double rouge1_recall(std::string_view candidate, std::string_view reference);

/* Throws ZeroVector and DimensionMismatch. */
double cosine_sim(std::span<const double> a, std::span<const double> b);

/* Term-frequency vector over vocab, one slot per entry in order. */
std::vector<double> embed_text(std::string_view text, const std::vector<std::string>& vocab);

/* Cosine between TF vectors over the union vocabulary of the two texts. */
double text_cosine(std::string_view a, std::string_view b);

/* Add-one-smoothed unigram LM; every token, seen or not, has p > 0. The
   probability constructor takes an explicit distribution instead (weights
   are normalized; lookups of unknown tokens use unknown_weight, which must
   be positive for them). */
class UnigramModel {
public:
  static UnigramModel from_counts(const std::map<std::string, std::size_t>& counts);
  static UnigramModel from_corpus(const std::vector<std::string>& documents);

  UnigramModel(const std::map<std::string, double>& weights, double unknown_weight = 0.0);

  double prob(const std::string& token) const;
  double log_prob(const std::string& token) const;
  std::size_t vocab_size() const { return probs_.size(); }

private:
  UnigramModel() = default;

  std::map<std::string, double> probs_;
  double unknown_prob_ = 0.0;
};

/* exp of mean negative log-probability over the text's tokens.
   Throws EmptyText when tokenization yields nothing. */
double perplexity(std::string_view text, const UnigramModel& lm);

/* Mean NPMI over word pairs inside frequency-clustered topics, document
   co-occurrence with add-one smoothing. Throws CorpusTooSmall when there are
   fewer documents than topics. */
double topic_coherence(const std::vector<std::string>& explanations, std::size_t topics = 5,
                       std::size_t top_k = 10);

struct TextQualityReport {
  double perplexity = 0.0;
  double topic_coherence = 0.0;
  double fres = 0.0;
  double rouge1_recall = 0.0;
  double cosine = 0.0;
};

/* Per-explanation row; coherence is corpus-level and passed through. */
TextQualityReport assess_quality(std::string_view candidate, std::string_view reference,
                                 const UnigramModel& lm, double coherence);

}  // namespace phishguard::explain
