#include "phishguard/adversarial/variant.hpp"

#include "phishguard/agents/prompts.hpp"
#include "phishguard/agents/runner.hpp"
#include "phishguard/errors.hpp"
#include "phishguard/text/strings.hpp"

namespace phishguard::adversarial {

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::SynonymSub: return "synonym_substitution";
    case TransformKind::SentenceRewrite: return "sentence_rewriting";
    case TransformKind::ContentMod: return "content_modification";
    case TransformKind::Homoglyph: return "homoglyph_replacement";
    case TransformKind::Polymorphic: return "polymorphic_variation";
  }
  return "unknown";
}

TransformKind transform_kind_from_string(std::string_view text) {
  for (TransformKind kind : {TransformKind::SynonymSub, TransformKind::SentenceRewrite,
                             TransformKind::ContentMod, TransformKind::Homoglyph,
                             TransformKind::Polymorphic}) {
    if (text == to_string(kind)) return kind;
  }
  raise(Errc::FormatMismatch, "unknown transform kind: " + std::string(text));
}

std::string_view to_string(Generator generator) {
  return generator == Generator::Llm ? "llm" : "rule_based";
}

namespace {

std::string rebuild_message(const email::ParsedEmail& mail, const std::string& subject,
                            const std::string& body) {
  std::string out;
  bool subject_emitted = false;
  for (const email::HeaderField& h : mail.headers) {
    std::string lower = text::to_lower(h.name);
    /* the rebuilt body is plain UTF-8 text; MIME framing headers would lie */
    if (lower == "content-type" || lower == "content-transfer-encoding" ||
        lower == "mime-version") {
      continue;
    }
    if (lower == "subject") {
      out += "Subject: " + subject + "\n";
      subject_emitted = true;
      continue;
    }
    out += h.name + ": " + h.value + "\n";
  }
  if (!subject_emitted && !subject.empty()) out += "Subject: " + subject + "\n";
  out += "\n";
  out += body;
  if (out.empty() || out.back() != '\n') out += '\n';
  return out;
}

}  // namespace

AdversarialVariant rule_based_variant(const email::ParsedEmail& mail,
                                      const std::set<TransformKind>& kinds, std::uint64_t seed,
                                      double homoglyph_intensity) {
  for (TransformKind kind : kinds) {
    require(kind == TransformKind::SynonymSub || kind == TransformKind::ContentMod ||
                kind == TransformKind::Homoglyph,
            Errc::Precondition, "rule_based_variant: unsupported transform kind");
  }
  require(mail.label != email::CorpusLabel::Unlabeled, Errc::Precondition,
          "rule_based_variant: source email must be labeled");

  std::string subject = mail.subject;
  std::string body = mail.body_text;
  std::vector<TransformKind> applied;

  if (kinds.count(TransformKind::SynonymSub) != 0) {
    TransformResult s = synonym_substitute(subject, SynonymTable::builtin(), seed);
    TransformResult b = synonym_substitute(body, SynonymTable::builtin(), seed + 1);
    if (s.replacements + b.replacements > 0) applied.push_back(TransformKind::SynonymSub);
    subject = std::move(s.text);
    body = std::move(b.text);
  }
  if (kinds.count(TransformKind::ContentMod) != 0) {
    TransformResult r = insert_neutral_sentence(body, seed + 2);
    if (r.replacements > 0) applied.push_back(TransformKind::ContentMod);
    body = std::move(r.text);
  }
  if (kinds.count(TransformKind::Homoglyph) != 0) {
    TransformResult r = homoglyph_replace(body, homoglyph_intensity, seed + 3);
    if (r.replacements > 0) applied.push_back(TransformKind::Homoglyph);
    body = std::move(r.text);
  }
  if (applied.empty()) {
    /* a variant must differ from its source */
    TransformResult r = insert_neutral_sentence(body, seed + 4);
    body = std::move(r.text);
    applied.push_back(TransformKind::ContentMod);
  }

  AdversarialVariant variant;
  variant.variant_id = mail.source_id + "#rb" + std::to_string(seed);
  variant.source_id = mail.source_id;
  variant.intended_label = mail.label;
  variant.transforms = std::move(applied);
  variant.generator = Generator::RuleBased;
  variant.text = rebuild_message(mail, subject, body);
  return variant;
}

AdversarialVariant generate_llm_variant(agents::ChatBackend& backend,
                                        const email::ParsedEmail& mail, email::CorpusLabel label,
                                        std::string_view emphasis) {
  auto messages = agents::build_adversarial_prompt(mail, label);
  if (!emphasis.empty()) {
    messages[0].content += "\n";
    messages[0].content += emphasis;
  }
  std::string reply = agents::complete_with_retry(backend, messages);
  std::string trimmed(text::trim(reply));
  require(!trimmed.empty(), Errc::EmptyVariant, "adversarial generator returned an empty variant");

  AdversarialVariant variant;
  variant.variant_id = mail.source_id + "#llm";
  variant.source_id = mail.source_id;
  variant.intended_label = label;
  variant.text = std::move(trimmed);
  variant.generator = Generator::Llm;
  return variant;
}

email::ParsedEmail parse_variant(const AdversarialVariant& variant) {
  email::RawEmail raw;
  raw.source_id = variant.variant_id;
  raw.bytes = variant.text;
  raw.label = variant.intended_label;
  try {
    return email::parse_eml(raw);
  } catch (const Error& e) {
    if (e.code() != Errc::UnparseableMessage) throw;
    raw.bytes = "Subject: adversarial variant\n\n" + variant.text;
    return email::parse_eml(raw);
  }
}

}  // namespace phishguard::adversarial
