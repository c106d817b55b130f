#pragma once

#include "phishguard/adversarial/variant.hpp"
#include "phishguard/fusion/train.hpp"

namespace phishguard::adversarial {

struct LoopConfig {
  std::uint64_t seed = 0;
  double sample_fraction = 0.5;   /* of each class, per round */
  double admission_cap = 0.2;     /* of the original pool size, per round */
  double threshold = 0.5;
  bool use_llm_generator = false; /* rule transforms by default, offline */
  std::set<TransformKind> rule_kinds{TransformKind::SynonymSub, TransformKind::ContentMod,
                                     TransformKind::Homoglyph};
  double base_intensity = 0.4;    /* homoglyph schedule: base + step * round */
  double intensity_step = 0.2;
  /* Retraining defaults to a fresh seeded fit of the augmented pool; once the
     policy has converged its Dirichlet is too peaked for new evader contexts
     to ever sample a correcting weight, so warm starts stop learning. */
  bool warm_start_retrain = false;
  fusion::TrainOptions retrain;
  std::filesystem::path run_dir;  /* round_k/variants.jsonl + feedback.jsonl when set */
};

struct RoundReport {
  int round = 0;  /* 1-based */
  std::size_t variants = 0;
  std::size_t evaded = 0;
  double evasion_rate = 0.0;
  std::size_t admitted = 0;
  std::size_t pool_size = 0;
};

struct LoopResult {
  std::vector<email::ParsedEmail> pool;      /* originals plus admitted variants */
  std::vector<std::string> generated_ids;    /* pool entries that are variants */
  fusion::PolicyParams params;
  std::vector<RoundReport> rounds;
};

/* Per round: sample both classes, generate label-preserving variants, score
   them with the current detector, admit evaders (capped) into the training
   pool, then refit the fusion policy on the augmented pool (skipped when no
   variant was admitted). Variants are written only under run_dir. Throws
   Precondition when rounds < 1; generator and detector errors propagate. */
LoopResult adversarial_loop(const std::vector<email::ParsedEmail>& corpus,
                            agents::ChatBackend& backend, const fusion::PolicyParams& params,
                            int rounds, const LoopConfig& cfg);

}  // namespace phishguard::adversarial
