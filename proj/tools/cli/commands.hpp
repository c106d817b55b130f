#pragma once

#include <optional>
#include <ostream>

#include "cli/run_config.hpp"

namespace phishguard::cli {

inline constexpr int kExitClean = 0;     /* ran, nothing flagged */
inline constexpr int kExitPhishing = 1;  /* ran, at least one phishing verdict */
inline constexpr int kExitError = 2;     /* operational failure */

struct ClassifyOptions {
  std::vector<CorpusSpec> inputs;  /* falls back to cfg.corpora when empty */
  std::optional<agents::ExplainMode> explain;
  std::filesystem::path checkpoint;  /* learned-mode params; fresh init otherwise */
};

struct TrainCmdOptions {
  std::filesystem::path resume;  /* continue from this checkpoint */
};

struct EvalOptions {
  std::filesystem::path predictions;  /* csv; empty runs the detector live */
};

struct AdversarialOptions {
  int rounds = 1;
  std::filesystem::path checkpoint;  /* starting detector; pretrained when empty */
  bool llm_variants = false;
};

struct QualityOptions {
  std::filesystem::path explanations;  /* one text per line */
  std::filesystem::path references;
};

/* Each command writes its JSONL artifacts under cfg.output_dir, a run_meta.json
   with the config snapshot and wall-clock timing, and a human summary to out.
   Failures print one machine-readable error line to err and exit 2. */
int cmd_classify(const RunConfig& cfg, const ClassifyOptions& opts, std::ostream& out,
                 std::ostream& err);
int cmd_train(const RunConfig& cfg, const TrainCmdOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_eval(const RunConfig& cfg, const EvalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_adversarial(const RunConfig& cfg, const AdversarialOptions& opts, std::ostream& out,
                    std::ostream& err);
int cmd_quality(const RunConfig& cfg, const QualityOptions& opts, std::ostream& out,
                std::ostream& err);

}  // namespace phishguard::cli
