#pragma once

#include <set>

#include "phishguard/adversarial/transforms.hpp"
#include "phishguard/agents/backend.hpp"
#include "phishguard/email/parser.hpp"

namespace phishguard::adversarial {

enum class TransformKind { SynonymSub, SentenceRewrite, ContentMod, Homoglyph, Polymorphic };

std::string_view to_string(TransformKind kind);
TransformKind transform_kind_from_string(std::string_view text);

enum class Generator { Llm, RuleBased };

std::string_view to_string(Generator generator);

struct AdversarialVariant {
  std::string variant_id;
  std::string source_id;
  email::CorpusLabel intended_label = email::CorpusLabel::Unlabeled;
  std::string text;  /* full rewritten message, headers included */
  std::vector<TransformKind> transforms;
  Generator generator = Generator::RuleBased;
};

struct FeedbackRecord {
  std::string variant_id;
  double score = 0.0;
  agents::Verdict label = agents::Verdict::Legitimate;
  bool evaded = false;
};

/* Deterministic offline generator. kinds may contain SynonymSub, ContentMod,
   and Homoglyph; they apply in that order and only the ones that changed the
   text are recorded. If no requested transform changed anything, a neutral
   sentence is inserted so the variant always differs from its source. */
AdversarialVariant rule_based_variant(const email::ParsedEmail& mail,
                                      const std::set<TransformKind>& kinds, std::uint64_t seed,
                                      double homoglyph_intensity = 0.5);

/* Prompts the backend with the label-matched instruction branch and takes the
   reply verbatim. emphasis, when non-empty, is appended to the system text
   (used by the loop to name the transform kinds that evaded last round).
   Throws EmptyVariant when the reply is blank, BackendUnavailable on
   transport failure. */
AdversarialVariant generate_llm_variant(agents::ChatBackend& backend,
                                        const email::ParsedEmail& mail, email::CorpusLabel label,
                                        std::string_view emphasis = {});

/* Variant text back into a parseable message; body-only replies get a
   minimal synthesized header block. */
email::ParsedEmail parse_variant(const AdversarialVariant& variant);

}  // namespace phishguard::adversarial
